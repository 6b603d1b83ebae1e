#!/usr/bin/env python3
"""
下載 Greenwich 每日半球黑子面積檔

The analysis library never goes online; this script fetches the daily file
into SUNSPOT_DATA_DIR once so the dataset tests and real runs can find it.

    python scripts/fetch_greenwich.py [--url URL] [--output PATH]
"""

import argparse
import sys
from pathlib import Path

import httpx

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.core.config import settings  # noqa: E402


def fetch(url: str, output: Path) -> int:
    output.parent.mkdir(parents=True, exist_ok=True)
    with httpx.Client(
        http2=True,
        timeout=httpx.Timeout(10.0, read=60.0),
        follow_redirects=True,
        headers={"User-Agent": "sunspot-periodicity/1.0"},
    ) as client:
        with client.stream("GET", url) as response:
            response.raise_for_status()
            with output.open("wb") as handle:
                for chunk in response.iter_bytes():
                    handle.write(chunk)
    return output.stat().st_size


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--url", default=settings.GREENWICH_DAILY_URL)
    parser.add_argument("--output", type=Path, default=settings.daily_area_path)
    args = parser.parse_args()
    try:
        size = fetch(args.url, args.output)
    except httpx.HTTPError as e:
        print(f"❌ download failed: {e}", file=sys.stderr)
        return 1
    print(f"✅ {size} bytes -> {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
