#!/usr/bin/env python3
"""Write the built-in fixture maps and environments as JSON files.

The files land in demos/data/ and are the inputs used by the other demo
scripts and by the command-line walkthrough in the README.
"""

import json
from pathlib import Path

from vroad.fixtures import FIXTURE_NAMES, env_doc, map_doc

DATA = Path(__file__).parent / "data"


def main():
    DATA.mkdir(exist_ok=True)
    for name in FIXTURE_NAMES:
        (DATA / f"{name}_map.json").write_text(json.dumps(map_doc(name)) + "\n")
        (DATA / f"{name}_env.json").write_text(json.dumps(env_doc(name)) + "\n")
        (DATA / f"{name}_env_obstacles.json").write_text(
            json.dumps(env_doc(name, obstacles=True)) + "\n"
        )
        print(f"wrote {name}: map, env, env_obstacles")
    print(f"\nAll files in {DATA}")


if __name__ == "__main__":
    main()
