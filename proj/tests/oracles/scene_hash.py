#!/usr/bin/env python3
"""Independent serializer for the scene state hash.

Builds the canonical scene text from first principles (no engine code) for a
few hand-described scenes and hashes it with hashlib. With --check it also
runs `noteg hash` on matching notebooks and compares all three: oracle,
binary, and the frozen golden constants below.

    scene_hash.py                      print oracle hashes
    scene_hash.py --check NOTEG        compare against the binary
"""

import hashlib
import json
import os
import subprocess
import sys
import tempfile

# Frozen from this oracle; the engine must reproduce them.
GOLDEN = {
    "empty": "fbe268d80218e12ac2bfffacbfcdbe02a2a97df895442cb8bf38d8fa31f5d064",
    "player_map": "f46f85736e2a2538a65f9e605ca593f743f83344ef9bfa1384cd0fd35d956e7d",
    "player_map_1000": "e506c8b462ecacfea9ba8d0125f5c1f652110bbbd9a1684458bc00e6aff08bb3",
}


def fixed6(x):
    s = "%.6f" % x
    return "0.000000" if s == "-0.000000" else s


def quote(s):
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def solid(color, w, h):
    return "sprite(%s,0,0,%d,%d,%s)" % (quote(color), w, h, quote(color))


def serialize(scene):
    lines = [
        "noteg-scene 1",
        "scene %d %d %s" % (scene["width"], scene["height"], scene["background"]),
        "tick %d" % scene["tick"],
        "next_id %d" % scene["next_id"],
        "rng %016x" % scene["rng"],
        "input " + (",".join(scene["input"]) or "-"),
    ]
    tm = scene.get("tilemap")
    if tm is None:
        lines.append("tilemap none")
    else:
        lines.append("tilemap %d %d %d" % (tm["cols"], tm["rows"], tm["tile_size"]))
        for row in tm["grid"]:
            lines.append("row " + " ".join(str(v) for v in row))
        for tid in sorted(tm["tileset"]):
            walk, sprite = tm["tileset"][tid]
            lines.append("tile %d %d %s" % (tid, 1 if walk else 0, sprite))
    lines.append("callbacks %d" % len(scene["callbacks"]))
    for fn, p in scene["callbacks"]:
        lines.append("callback %s %s" % (fn, fixed6(p)))
    lines.append("entities %d" % len(scene["entities"]))
    for e in sorted(scene["entities"], key=lambda e: e["id"]):
        lines.append("entity %d" % e["id"])
        lines.append("  name " + (quote(e["name"]) if e["name"] is not None else "nil"))
        lines.append("  kind " + e["kind"])
        for key in ("pos", "size", "vel"):
            lines.append("  %s %s %s" % (key, fixed6(e[key][0]), fixed6(e[key][1])))
        lines.append("  health " + fixed6(e["health"]))
        lines.append("  speed " + fixed6(e["speed"]))
        lines.append("  sprite " + e["sprite"])
        lines.append("  on_update nil")
        lines.append("  on_collide nil")
        lines.append("  custom %d" % len(e["custom"]))
        for k in sorted(e["custom"]):
            lines.append("  field %s %s" % (quote(k), e["custom"][k]))
        lines.append("  alive 1")
    return "".join(line + "\n" for line in lines)


def digest(scene):
    return hashlib.sha256(serialize(scene).encode("utf-8")).hexdigest()


def empty_scene():
    return {"width": 800, "height": 600, "background": "#000000", "tick": 0, "next_id": 1,
            "rng": 42, "input": [], "tilemap": None, "callbacks": [], "entities": []}


def player_map_scene(ticks):
    # start_game(800, 600, "#000000"); create_map("#336633");
    # create_player("hero", "#3050ff", 100, 100); add_trinket("#ffcc00", 50, 60)
    cols, rows = -(-800 // 32), -(-600 // 32)
    s = empty_scene()
    s["tick"] = ticks
    s["next_id"] = 3
    s["tilemap"] = {"cols": cols, "rows": rows, "tile_size": 32,
                    "grid": [[0] * cols for _ in range(rows)],
                    "tileset": {0: (True, solid("#336633", 32, 32))}}
    s["entities"] = [
        {"id": 1, "name": "hero", "kind": "player", "pos": (100, 100), "size": (24, 24),
         "vel": (0, 0), "health": 100, "speed": 120, "sprite": solid("#3050ff", 24, 24),
         "custom": {}},
        {"id": 2, "name": None, "kind": "trinket", "pos": (50, 60), "size": (16, 16),
         "vel": (0, 0), "health": 100, "speed": 0, "sprite": solid("#ffcc00", 16, 16),
         "custom": {}},
    ]
    return s


PLAYER_MAP_SOURCE = ('start_game(800, 600, "#000000")\n'
                     'create_map("#336633")\n'
                     'create_player("hero", "#3050ff", 100, 100)\n'
                     'add_trinket("#ffcc00", 50, 60)\n')

CASES = {
    "empty": (empty_scene(), [], 0),
    "player_map": (player_map_scene(0), [PLAYER_MAP_SOURCE], 0),
    "player_map_1000": (player_map_scene(1000), [PLAYER_MAP_SOURCE], 1000),
}


def notebook(sources):
    cells = [{"id": "c%d" % (i + 1), "kind": "code", "hidden": False, "source": src}
             for i, src in enumerate(sources)]
    return {"version": 1, "seed": 42, "assets": [], "cells": cells}


def run_binary(noteg, sources, ticks):
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "case.noteg.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(notebook(sources), f)
        out = subprocess.run([noteg, "hash", "--notebook", path, "--ticks", str(ticks)],
                             check=True, capture_output=True, text=True)
        return out.stdout.strip()


def main(argv):
    if len(argv) >= 2 and argv[1] == "--check":
        noteg = argv[2]
        failed = False
        for name, (scene, sources, ticks) in CASES.items():
            oracle = digest(scene)
            binary = run_binary(noteg, sources, ticks)
            ok = oracle == binary == GOLDEN[name]
            failed |= not ok
            print("%s %s oracle=%s binary=%s golden=%s" %
                  ("PASS" if ok else "FAIL", name, oracle, binary, GOLDEN[name]))
        return 1 if failed else 0
    for name, (scene, _, _) in CASES.items():
        print(name, digest(scene))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
