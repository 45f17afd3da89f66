import pytest

import core.existing_writers
import offdiag.exceptions
import offdiag.writer

from offdiag.writer import Message


class ListWriter(offdiag.writer.WriterBase):
    seen = []

    def handle(self, message: Message):
        ListWriter.seen.append((message.importance, message.text))


@pytest.fixture
def listwriter():
    offdiag.writer.add_writer_type('list', ListWriter)
    ListWriter.seen = []
    yield ListWriter.seen


def test_no_writers_is_silent():
    offdiag.writer.warn("nobody listens")
    assert offdiag.writer.get_enabled() == set()


def test_mask_filters_levels(listwriter):
    offdiag.writer.enable('list', {'mask': Message.WARN | Message.ERRR})
    offdiag.writer.debug("hidden")
    offdiag.writer.warn("shown", 1)
    offdiag.writer.error("also shown")
    assert listwriter == [(Message.WARN, "shown 1"), (Message.ERRR, "also shown")]


def test_enable_disable_cycle(listwriter):
    offdiag.writer.enable('list', {})
    assert 'list' in offdiag.writer.get_enabled()
    with pytest.raises(offdiag.exceptions.WriterAlreadyEnabled):
        offdiag.writer.enable('list', {})
    offdiag.writer.disable('list')
    with pytest.raises(offdiag.exceptions.WriterAlreadyDisabled):
        offdiag.writer.disable('list')
    with pytest.raises(offdiag.exceptions.WriterNotFound):
        offdiag.writer.enable('carrier-pigeon', {})


def test_writer_names_are_unique(listwriter):
    with pytest.raises(offdiag.exceptions.WriterException):
        offdiag.writer.add_writer_type('list', offdiag.writer.WriterBase)


def test_file_writer(tmp_path):
    core.existing_writers.add_known_writers()
    debug_log = tmp_path / 'logs' / 'debug.log'
    warn_log = tmp_path / 'logs' / 'warn.log'
    offdiag.writer.enable('logfile', {'files': [
        {'path': str(debug_log), 'mask': 0b1111111},
        {'path': str(warn_log), 'mask': Message.WARN},
    ]})
    offdiag.writer.debug("eps ladder clipped")
    offdiag.writer.warn("two lines\nof warning")
    offdiag.writer.disable('logfile')
    debug_text = debug_log.read_text()
    assert "eps ladder clipped" in debug_text and "of warning" in debug_text
    warn_lines = warn_log.read_text().splitlines()
    assert len(warn_lines) == 2
    assert all("WARN" in line for line in warn_lines)


def test_file_writer_validates():
    core.existing_writers.add_known_writers()
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.writer.enable('logfile', {'files': 'debug.log'})
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        offdiag.writer.enable('logfile', {'files': [{'path': 'debug.log'}]})


def test_stderr_writer(capsys):
    core.existing_writers.add_known_writers()
    offdiag.writer.enable('stderr', {'colour': False})
    offdiag.writer.info("not by default")
    offdiag.writer.warn("boundary value at an atom")
    err = capsys.readouterr().err
    assert err == "[WARN] boundary value at an atom\n"


def test_stderr_writer_colour(capsys):
    core.existing_writers.add_known_writers()
    offdiag.writer.enable('stderr', {'colour': True, 'mask': ['ERRR']})
    offdiag.writer.warn("masked out")
    offdiag.writer.error("oracle\nfailed")
    lines = capsys.readouterr().err.splitlines()
    assert lines == ["\033[31m[ERRR]\033[0m oracle", "\033[31m[ERRR]\033[0m failed"]


def test_parse_mask():
    assert offdiag.writer.parse_mask(0b1111000, 'm') == 0b1111000
    assert offdiag.writer.parse_mask(['WARN', 'ERRR'], 'm') == Message.WARN | Message.ERRR
    assert offdiag.writer.parse_mask([], 'm') == 0
    with pytest.raises(offdiag.exceptions.InvalidConfigValue) as info:
        offdiag.writer.parse_mask(['WARN', 'LOUD'], 'writers.stderr.mask')
    assert info.value.key_path == 'writers.stderr.mask[1]'
    for bad in (0b10000000, -1, True, 'WARN', 1.5):
        with pytest.raises(offdiag.exceptions.InvalidConfigValue):
            offdiag.writer.parse_mask(bad, 'm')


def test_bad_mask_is_reported_on_enable(listwriter):
    with pytest.raises(offdiag.exceptions.InvalidConfigValue) as info:
        offdiag.writer.enable('list', {'mask': ['DEBUG']})
    assert info.value.key_path == 'writers.list.mask[0]'
    assert 'list' not in offdiag.writer.get_enabled()


def test_every_level_fans_out(listwriter):
    assert 'list' in offdiag.writer.get_known()
    offdiag.writer.enable('list', {})
    for log in (offdiag.writer.debug, offdiag.writer.info, offdiag.writer.success, offdiag.writer.warn,
                offdiag.writer.error, offdiag.writer.critical, offdiag.writer.alert):
        log("level")
    assert [importance for importance, _ in listwriter] == [1, 2, 4, 8, 16, 32, 64]
