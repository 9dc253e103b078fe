"""Shipped formulas and the self-modifying code sample.

The sample program, one byte per address::

    0x0  jmp 0x2
    0x2  push 0x9        (rewritten to jmp 0x9 by the mov)
    0x4  mov 0x2 0xc
    0x7  jmp 0x2
    0x9  call CopyFileA

Controls are addresses; the stack holds pushed values (``s9``) above the
entry symbol ``e``.  The ``mov`` becomes a modifying rule that removes the
push rules at ``n2`` and enables the jump rules to ``n9``.  Without it the
program loops through ``n2 n4 n7`` forever and never calls CopyFileA.
"""
from __future__ import annotations

from .io import ModelBundle, parse_model

FORMULAS = {
    "registry-key": "F(call_GetModuleFileNameA && F call_RegSetValueExA)",
    "data-steal": ("F(call_GetModuleHandleA && F(call_FindFirstFileA && F(call_CreateFileMappingA"
                   " && F(call_MapViewOfFile && F call_CopyFileA))))"),
    "spy-worm": "F((call_GetAsyncKeyState || call_GetRawInputData) && F(call_sendto || call_send))",
}

_SAMPLE = """\
# self-modifying sample: the mov at n4 turns "push 0x9" at n2 into "jmp 0x9"
states: n0 n2 n4 n7 n9 ncall nend
gamma: e s9
atoms: call_CopyFileA
label ncall { call_CopyFileA }
rule j0e: n0 e -> n2 e
rule j0s: n0 s9 -> n2 s9
rule push_e: n2 e -> n4 s9 e
rule push_s: n2 s9 -> n4 s9 s9
rule jmp9_e: n2 e -> n9 e
rule jmp9_s: n2 s9 -> n9 s9
{mov}
rule j7e: n7 e -> n2 e
rule j7s: n7 s9 -> n2 s9
rule c9e: n9 e -> ncall e
rule c9s: n9 s9 -> ncall s9
rule rete: ncall e -> nend e
rule rets: ncall s9 -> nend s9
rule halte: nend e -> nend e
rule halts: nend s9 -> nend s9
phase0: j0e j0s push_e push_s {phase_mov} j7e j7s c9e c9s rete rets halte halts
init: n0 e
"""

_MOV = "crule mov: n4 ( push_e push_s | jmp9_e jmp9_s ) n7"
# the same instruction read as a plain no-op, as a syntactic CFG would
_MOV_ERASED = "rule mov_e: n4 s9 -> n7 s9\nrule mov_s: n4 e -> n7 e"


def sample_text(erased: bool = False) -> str:
    if erased:
        return _SAMPLE.replace("{mov}", _MOV_ERASED).replace("{phase_mov}", "mov_e mov_s")
    return _SAMPLE.replace("{mov}", _MOV).replace("{phase_mov}", "mov")


def sample_bundle(erased: bool = False) -> ModelBundle:
    """The sample program; ``erased`` drops the self-modification."""
    return parse_model(sample_text(erased))
