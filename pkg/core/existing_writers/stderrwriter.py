import sys

from typing import (
    Any,
    Dict
)

from offdiag.writer import WriterBase, Message

COLOURS = {
    Message.DBUG: "\033[35m",
    Message.INFO: "\033[34m",
    Message.SUCC: "\033[32m",
    Message.WARN: "\033[33m",
    Message.ERRR: "\033[31m",
    Message.CRIT: "\033[37m\033[41m",
    Message.ALRT: "\033[37m\033[41m",
}


class StderrWriter(WriterBase):
    """ Writes to stderr, coloured only when stderr is a terminal. """
    # stdout carries records and certificates
    default_mask = 0b1111000

    def __init__(self, config: Dict[str, Any], name: str = 'stderr'):
        super().__init__(config, name)
        self.colour = bool(config.get('colour', sys.stderr.isatty()))

    def header(self, msg: Message) -> str:
        if self.colour: return f"{COLOURS[msg.importance]}[{msg.tag}]\033[0m"
        return f"[{msg.tag}]"

    def handle(self, msg: Message):
        header = self.header(msg)
        for line in msg.text.split('\n'):
            print(header, line, flush=True, file=sys.stderr)
