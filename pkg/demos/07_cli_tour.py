"""
The command line, driven from Python
====================================

Same as running ``posetmod gallery three-lines > m.json`` and then
``posetmod analyze m.json``.
"""

import json
import tempfile
from pathlib import Path

from posetmod import cli, io

code, doc, _ = cli.run(["gallery", "three-lines"])
path = Path(tempfile.mkdtemp()) / "three-lines.json"
path.write_text(io.dumps(doc))
print(path.read_text())

code, report, summary = cli.run(["analyze", str(path)])
print("exit code", code)
print(summary)
print(json.dumps(report["local_structure"]["excess"]))

code, report, summary = cli.run(["analyze", str(path.with_name("missing.json"))])
print("missing file -> exit code", code, "|", report["error"])
