"""Every example documented in README.md is executed and golden-checked."""

from __future__ import annotations

import re
import shlex
from pathlib import Path

import pytest

import test_cli

README = Path(__file__).resolve().parent.parent / "README.md"


def fenced_blocks(text):
    """(info string, body) for every fenced code block, in order."""
    out = []
    for m in re.finditer(r"```(\w*)\n(.*?)```", text, re.DOTALL):
        out.append((m.group(1), m.group(2)))
    return out


BLOCKS = fenced_blocks(README.read_text())


def documented_zii_commands():
    cmds = []
    for info, body in BLOCKS:
        if info != "sh":
            continue
        for line in body.splitlines():
            line = line.strip()
            if line.startswith("zii "):
                cmds.append(shlex.split(line)[1:])
    return cmds


def normalize(args):
    """Command identity modulo the --out target path."""
    out = []
    skip = False
    for a in args:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            out.append("--out")
            continue
        out.append(a)
    return tuple(out)


class TestReadmeExamples:
    def test_every_documented_command_is_golden_tested(self):
        documented = {normalize(c) for c in documented_zii_commands()}
        golden = {
            normalize(args if not uses_out else [*args, "--out", "x"])
            for args, _, uses_out in test_cli.golden_commands()
        }
        assert documented == golden

    def test_inline_outputs_match_golden_files(self):
        # every plain fenced block that directly follows a `zii ...` block is
        # the documented output of that command and must byte-match its golden
        checked = 0
        for (info_a, body_a), (info_b, body_b) in zip(BLOCKS, BLOCKS[1:]):
            if info_a != "sh" or info_b != "":
                continue
            lines = [l.strip() for l in body_a.splitlines() if l.strip()]
            if len(lines) != 1 or not lines[0].startswith("zii "):
                continue
            args = shlex.split(lines[0])[1:]
            matches = [
                path
                for cmd_args, path, uses_out in test_cli.golden_commands()
                if not uses_out and cmd_args == args
            ]
            assert matches, f"README shows output for an untested command: {args}"
            assert body_b == matches[0].read_text(), args
            checked += 1
        assert checked >= 4

    def test_python_quickstart_executes(self):
        blocks = [body for info, body in BLOCKS if info == "python"]
        assert len(blocks) == 1
        exec(compile(blocks[0], str(README), "exec"), {"__name__": "__readme__"})
