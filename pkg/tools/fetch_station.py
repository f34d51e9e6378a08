#!/usr/bin/env python3
"""Download hourly water levels for a Canadian tide station and write the
timestamp,level CSV the detrend command ingests.

The Integrated Water Level System API serves historical hourly means per
station (https://api.iwls-sine.azure.cloud-nuage.dfo-mpo.gc.ca); this
script pages through a year at a time. Station codes of interest:
Saint John 65, Yarmouth 365, Port-Aux-Basques 665.

Usage:
    python tools/fetch_station.py --code 65 --start 1941 --end 2023 \
        --out data/saintjohn_hourly.csv

Requires network access and the `requests` package; intended to be run
once on a connected machine. The test suite skips real-data checks when
the file is absent.
"""

import argparse
import csv
import sys
import time

try:
    import requests
except ImportError:  # pragma: no cover
    sys.stderr.write("this script needs the requests package\n")
    raise SystemExit(1)

API = "https://api.iwls-sine.azure.cloud-nuage.dfo-mpo.gc.ca/api/v1"


def find_station_id(code: str) -> str:
    r = requests.get(f"{API}/stations", params={"code": code}, timeout=60)
    r.raise_for_status()
    stations = r.json()
    if not stations:
        raise SystemExit(f"no station with code {code}")
    return stations[0]["id"]


def fetch_year(station_id: str, year: int):
    # wlo = observed water level; hourly means are served as wlp-hilo-free
    # series depending on station vintage, so fall back across codes
    for series in ("wlo", "wl-hourly", "wlp"):
        r = requests.get(
            f"{API}/stations/{station_id}/data",
            params={
                "time-series-code": series,
                "from": f"{year}-01-01T00:00:00Z",
                "to": f"{year}-12-31T23:59:59Z",
                "resolution": "SIXTY_MINUTES",
            },
            timeout=120,
        )
        if r.status_code == 200 and r.json():
            return r.json()
    return []


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--code", required=True, help="station code, e.g. 65 for Saint John")
    parser.add_argument("--start", type=int, required=True)
    parser.add_argument("--end", type=int, required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--pause", type=float, default=1.0, help="seconds between requests")
    args = parser.parse_args()

    station_id = find_station_id(args.code)
    rows = []
    for year in range(args.start, args.end + 1):
        data = fetch_year(station_id, year)
        for item in data:
            rows.append((item["eventDate"], item["value"]))
        sys.stderr.write(f"{year}: {len(data)} observations\n")
        time.sleep(args.pause)

    rows.sort()
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "level"])
        writer.writerows(rows)
    sys.stderr.write(f"wrote {len(rows)} rows to {args.out}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
