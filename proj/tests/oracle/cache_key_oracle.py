#!/usr/bin/env python3
"""Independent generator for the cache-key golden digests.

Canonical request encoding: UTF-8 bytes of
    model 0x00 prompt 0x00 dec(temperature) 0x00 dec(max_tokens) 0x00 stops
with the stop strings joined by 0x1F, where dec() renders the number in
decimal with trailing zeros (and a trailing dot) trimmed. The digest is
lowercase SHA-256 hex.

Writes tests/golden/cache_keys.json.
"""

import hashlib
import json
import sys
from pathlib import Path

FIXTURES = [
    {"model": "text-davinci-002", "prompt": "Are Product A and Product B the same?", "max_tokens": 30, "temperature": 0.0, "stop": ["\n\n"]},
    {"model": "text-davinci-002", "prompt": "Are Product A and Product B the same?", "max_tokens": 30, "temperature": 0.5, "stop": ["\n\n"]},
    {"model": "text-davinci-002", "prompt": "Are Product A and Product B the same?", "max_tokens": 10, "temperature": 0.0, "stop": ["\n\n"]},
    {"model": "gpt-j-6b", "prompt": "Are Product A and Product B the same?", "max_tokens": 30, "temperature": 0.0, "stop": ["\n\n"]},
    {"model": "text-davinci-002", "prompt": "Is there an error in City: chicagoo?", "max_tokens": 30, "temperature": 0.0, "stop": ["\n\n"]},
    {"model": "text-davinci-002", "prompt": "city?", "max_tokens": 30, "temperature": 0.25, "stop": ["\n", "END"]},
    {"model": "text-davinci-002", "prompt": "city?", "max_tokens": 30, "temperature": 0.25, "stop": []},
    {"model": "text-davinci-002", "prompt": "Input: 2006-12-25\nOutput:", "max_tokens": 30, "temperature": 1.0, "stop": ["\n"]},
    {"model": "text-davinci-002", "prompt": "prompt with unicode éèê and a tab\there", "max_tokens": 64, "temperature": 0.7, "stop": ["\n\n"]},
    {"model": "text-davinci-002", "prompt": "", "max_tokens": 1, "temperature": 2.0, "stop": [""]},
]


def dec(x):
    s = repr(float(x)) if isinstance(x, float) else str(x)
    if "." in s and "e" not in s and "E" not in s:
        s = s.rstrip("0").rstrip(".")
    return s or "0"


def digest(req):
    parts = [
        req["model"].encode("utf-8"),
        req["prompt"].encode("utf-8"),
        dec(req["temperature"]).encode("utf-8"),
        dec(req["max_tokens"]).encode("utf-8"),
        b"\x1f".join(s.encode("utf-8") for s in req["stop"]),
    ]
    return hashlib.sha256(b"\x00".join(parts)).hexdigest()


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "golden" / "cache_keys.json"
    entries = [{"request": req, "digest": digest(req)} for req in FIXTURES]
    out.write_text(json.dumps(entries, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(entries)} entries)")


if __name__ == "__main__":
    main()
