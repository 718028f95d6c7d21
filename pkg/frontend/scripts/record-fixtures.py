"""Record API responses from a demo workspace into tests/fixtures/.

Regenerate with:
    python scripts/record-fixtures.py <workspace-dir>

The recorded files let the vitest suite run without the core service.
"""

import json
import shutil
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from stancegen.service.app import create_app


def main() -> None:
    workspace = Path(sys.argv[1])
    out = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    curation = workspace / "curation"
    if curation.exists():
        shutil.rmtree(curation)

    client = TestClient(create_app(workspace))

    def record(name: str, response) -> None:
        payload = {"status": response.status_code, "body": response.json()}
        (out / f"{name}.json").write_text(
            json.dumps(payload, indent=1, ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )
        print(f"{name}: {response.status_code}")

    record("state", client.get("/api/state"))
    record("users", client.get("/api/users?limit=5&offset=0"))
    record("label_fav000", client.post("/api/users/fav000/label", json={"label": "FAVOR"}))
    record("label_agt000", client.post("/api/users/agt000/label", json={"label": "AGAINST"}))
    record("label_unknown", client.post("/api/users/ghost/label", json={"label": "FAVOR"}))
    record("hashtags", client.get("/api/hashtags?min_freq=2"))
    record(
        "hashtag_selection",
        client.post(
            "/api/hashtags/selection",
            json={"accepted": ["independencia", "tabarnia", "republicacatalana"]},
        ),
    )
    record(
        "hashtag_selection_unknown",
        client.post("/api/hashtags/selection", json={"accepted": ["nosuchtag9"]}),
    )
    record("distribution", client.get("/api/distribution"))
    record("topics", client.get("/api/topics"))
    record(
        "topic_selection",
        client.post("/api/topics/selection", json={"language": "es", "accepted": [0, 1], "min_share": 0.5}),
    )
    record(
        "topic_selection_empty",
        client.post("/api/topics/selection", json={"language": "es", "accepted": [], "min_share": 0.5}),
    )
    shutil.rmtree(curation, ignore_errors=True)


if __name__ == "__main__":
    main()
