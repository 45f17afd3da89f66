import importlib
import sys

import offdiag.writer

# config name -> (module, class)
KNOWN_WRITERS = {
    'logfile': ('.filewriter', 'FileWriter'),
    'stderr': ('.stderrwriter', 'StderrWriter'),
}

def add_known_writers():
    for name, (module, cls) in KNOWN_WRITERS.items():
        try:
            writer_class = getattr(importlib.import_module(module, __name__), cls)
            offdiag.writer.add_writer_type(name, writer_class)
        except Exception as e:
            print(f"Failed to import {cls}:", e, file=sys.stderr)
