#
# offdiag/writer.py
#
# message levels and the writer fan-out. library code logs through the
# module-level functions; with no writer enabled they are no-ops.
#

import datetime
import threading

from dataclasses import dataclass, field
from typing import (
    Any,
    Dict,
    Iterable,
    Set,
    Tuple,
    Type,
    Union
)

import offdiag.exceptions



@dataclass(frozen=True)
class Message:
    parts: Tuple[Any, ...]
    importance: int
    time: datetime.datetime = field(default_factory=datetime.datetime.now)

    # criticality levels, one bit each so writers can mask them
    ALRT = 0x40
    CRIT = 0x20
    ERRR = 0x10
    WARN = 0x08
    SUCC = 0x04
    INFO = 0x02
    DBUG = 0x01

    @property
    def tag(self) -> str:
        return LEVEL_TAGS[self.importance]

    @property
    def text(self) -> str:
        return ' '.join(str(p) for p in self.parts)


LEVEL_TAGS = {
    Message.DBUG: "DBUG",
    Message.INFO: "INFO",
    Message.SUCC: "SUCC",
    Message.WARN: "WARN",
    Message.ERRR: "ERRR",
    Message.CRIT: "CRIT",
    Message.ALRT: "ALRT",
}
ALL_LEVELS = 0b1111111


def parse_mask(value: Union[int, Iterable[str]], key_path: str) -> int:
    """
    A writer mask is either an int of level bits (``0b1111000``) or a list
    of level tags (``[WARN, ERRR, CRIT, ALRT]``).
    """
    if isinstance(value, bool):
        raise offdiag.exceptions.InvalidConfigValue(key_path, f"expected a mask, got {value!r}")
    if isinstance(value, int):
        if not 0 <= value <= ALL_LEVELS:
            raise offdiag.exceptions.InvalidConfigValue(key_path, f"mask {value:#b} has bits outside {ALL_LEVELS:#b}")
        return value
    if isinstance(value, (list, tuple)):
        by_tag = {tag: level for level, tag in LEVEL_TAGS.items()}
        mask = 0
        for i, tag in enumerate(value):
            if tag not in by_tag:
                raise offdiag.exceptions.InvalidConfigValue(f"{key_path}[{i}]",
                    f"unknown level {tag!r}, expected one of {', '.join(by_tag)}")
            mask |= by_tag[tag]
        return mask
    raise offdiag.exceptions.InvalidConfigValue(key_path, f"expected a mask, got {value!r}")



class WriterBase():
    """ Base writer class. Subclasses implement :meth:`handle`. """
    default_mask = ALL_LEVELS

    def __init__(self, config: Dict[str, Any], name: str = 'writer'):
        self.name = name
        self.mask = parse_mask(config.get('mask', self.default_mask), f"writers.{name}.mask")
        self._lock = threading.Lock()

    def handle(self, message: Message):
        raise NotImplementedError()

    def close(self):
        """ Release whatever the writer holds open. Nothing by default. """

    def accepts(self, importance: int) -> bool:
        return bool(self.mask & importance)

    def emit(self, message: Message):
        if not self.accepts(message.importance): return
        with self._lock:
            self.handle(message)



_known: Dict[str, Type[WriterBase]] = {}
_enabled: Dict[str, WriterBase] = {}

def add_writer_type(name: str, writer_class: Type[WriterBase]) -> None:
    if _known.get(name, writer_class) is not writer_class:
        raise offdiag.exceptions.WriterException(f"A writer of this name ('{name}') already exists")
    _known[name] = writer_class

def enable(name: str, config: Dict[str, Any]) -> None:
    if name not in _known:
        raise offdiag.exceptions.WriterNotFound(name)
    if name in _enabled:
        raise offdiag.exceptions.WriterAlreadyEnabled(name)
    _enabled[name] = _known[name](config, name)

def disable(name: str) -> None:
    if name not in _known:
        raise offdiag.exceptions.WriterNotFound(name)
    writer = _enabled.pop(name, None)
    if writer is None:
        raise offdiag.exceptions.WriterAlreadyDisabled(name)
    writer.close()

def get_enabled() -> Set[str]:
    return set(_enabled)

def get_known() -> Set[str]:
    return set(_known)


def _fan_out(importance: int, parts: Tuple[Any, ...]):
    if not _enabled: return
    message = Message(parts, importance)
    for writer in list(_enabled.values()):
        writer.emit(message)

def debug(*msg):    _fan_out(Message.DBUG, msg)
def info(*msg):     _fan_out(Message.INFO, msg)
def success(*msg):  _fan_out(Message.SUCC, msg)
def warn(*msg):     _fan_out(Message.WARN, msg)
def error(*msg):    _fan_out(Message.ERRR, msg)
def critical(*msg): _fan_out(Message.CRIT, msg)
def alert(*msg):    _fan_out(Message.ALRT, msg)
