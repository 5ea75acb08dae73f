#!/usr/bin/env python3
"""Regenerate the frontend test fixtures from the Python engine.

Copies the six-by-six golden record next to the TypeScript tests and dumps
the replay endpoint's JSON response for it, so the view and e2e tests can
check the client against the exact sync stream a server would produce.

Run from anywhere: python3 tools/make_fixtures.py
"""

import json
import shutil
import sys
from pathlib import Path

FRONTEND = Path(__file__).resolve().parent.parent
REPO = FRONTEND.parent
RECORD = REPO / "tests" / "fixtures" / "game1_6x6.qgr"
OUT = FRONTEND / "tests" / "fixtures"


def main() -> int:
    sys.path.insert(0, str(REPO / "src"))
    from fastapi.testclient import TestClient

    from qugo.webapp import build_app

    OUT.mkdir(parents=True, exist_ok=True)
    shutil.copy(RECORD, OUT / RECORD.name)

    with TestClient(build_app()) as client:
        resp = client.post("/api/replay", content=RECORD.read_bytes())
    resp.raise_for_status()
    transcript = resp.json()
    path = OUT / "game1_transcript.json"
    path.write_text(json.dumps(transcript, indent=1) + "\n")
    syncs = transcript["syncs"]
    print(f"wrote {path.relative_to(FRONTEND)}: {len(syncs)} syncs, "
          f"result {transcript['result']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
