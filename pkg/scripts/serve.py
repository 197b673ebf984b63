#!/usr/bin/env python3
"""Run the HTTP service (default http://127.0.0.1:8000).

PREFSEL_SESSION_SNAPSHOT=<path> persists sessions to disk on shutdown and
restores them at startup; PREFSEL_NODE_BUDGET caps solver nodes per solve.
"""

import argparse

import uvicorn


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args()
    uvicorn.run("prefsel.service:app", host=args.host, port=args.port)


if __name__ == "__main__":
    main()
