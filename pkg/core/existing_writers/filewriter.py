import os

from typing import (
    Any,
    Dict,
    IO,
    List,
    Tuple
)

import offdiag.exceptions
import offdiag.writer

from offdiag.writer import WriterBase, Message

default_strftime = "%Y-%m-%d %H:%M:%S"


class FileWriter(WriterBase):
    """
    Appends to one or more logfiles, each with its own mask. Config::

        files:
          - {path: logs/debug.log, mask: 0b1111111}
          - {path: logs/important.log, mask: [WARN, ERRR], strftime: "%H:%M:%S"}

    Files stay open until the writer is disabled.
    """
    def __init__(self, config: Dict[str, Any], name: str = 'logfile'):
        super().__init__(config, name)
        entries = config.get('files')
        if not isinstance(entries, list):
            raise offdiag.exceptions.InvalidConfigValue(f"writers.{name}.files", "must be a list")
        self.files: List[Tuple[IO[str], int, str]] = []
        try:
            for i, entry in enumerate(entries):
                key = f"writers.{name}.files[{i}]"
                if not isinstance(entry, dict) or 'path' not in entry or 'mask' not in entry:
                    raise offdiag.exceptions.InvalidConfigValue(key, "must be a {path, mask, strftime} mapping")
                mask = offdiag.writer.parse_mask(entry['mask'], f"{key}.mask")
                path = os.path.abspath(str(entry['path']))
                os.makedirs(os.path.dirname(path), exist_ok=True)
                self.files.append((open(path, 'a'), mask, str(entry.get('strftime', default_strftime))))
        except BaseException:
            self.close()
            raise

    def handle(self, msg: Message):
        lines = msg.text.split('\n')
        for file, mask, strftime in self.files:
            if not mask & msg.importance: continue
            date = msg.time.strftime(strftime)
            file.write(''.join(f"{date} {msg.tag} {line}\n" for line in lines))
            file.flush()

    def close(self):
        for file, _, _ in self.files:
            file.close()
        self.files = []
