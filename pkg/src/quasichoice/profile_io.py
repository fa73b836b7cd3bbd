"""Line-based text format for profiles.

::

    alternatives: a b c
    individual
    a > b          # adds (a, b)
    b = c          # adds (b, c) and (c, b)
    individual
    linear c b a   # adds (c, b), (c, a), (b, a)

Reflexive pairs are implicit, ``#`` starts a comment, blank lines are ignored
and repeating a statement has no further effect.
"""

from __future__ import annotations

import numpy as np

from .profiles import Profile, ProfileError


class ProfileFormatError(ProfileError):
    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


def _valid_label(label: str) -> bool:
    return bool(label) and not any(ch.isspace() or ch in "{}#" for ch in label)


def parse_profile(text: str) -> Profile:
    labels: list[str] | None = None
    index: dict[str, int] = {}
    blocks: list[list[tuple[int, int]]] = []

    def lookup(label: str, lineno: int) -> int:
        try:
            return index[label]
        except KeyError:
            raise ProfileFormatError(f"undeclared alternative {label!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if labels is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip() != "alternatives":
                raise ProfileFormatError("expected 'alternatives: <label> ...'", lineno)
            labels = rest.split()
            if not labels:
                raise ProfileFormatError("no alternatives declared", lineno)
            for lab in labels:
                if not _valid_label(lab):
                    raise ProfileFormatError(f"invalid label {lab!r}", lineno)
                if lab in index:
                    raise ProfileFormatError(f"duplicate alternative {lab!r}", lineno)
                index[lab] = len(index)
            continue
        tokens = line.split()
        if tokens == ["individual"]:
            blocks.append([])
            continue
        if not blocks:
            raise ProfileFormatError("statement before the first 'individual'", lineno)
        pairs = blocks[-1]
        if tokens[0] == "linear":
            order = [lookup(t, lineno) for t in tokens[1:]]
            if len(set(order)) != len(order):
                raise ProfileFormatError("'linear' repeats an alternative", lineno)
            pairs.extend((a, b) for k, a in enumerate(order) for b in order[k + 1:])
        elif len(tokens) == 3 and tokens[1] in (">", "="):
            x, y = lookup(tokens[0], lineno), lookup(tokens[2], lineno)
            pairs.append((x, y))
            if tokens[1] == "=":
                pairs.append((y, x))
        else:
            raise ProfileFormatError(f"cannot parse statement {line!r}", lineno)

    if labels is None:
        raise ProfileFormatError("missing 'alternatives:' line")
    if not blocks:
        raise ProfileFormatError("profile has no individuals")
    m = len(labels)
    stack = np.zeros((len(blocks), m, m), dtype=bool)
    stack[:, np.arange(m), np.arange(m)] = True
    for i, pairs in enumerate(blocks):
        for x, y in pairs:
            stack[i, x, y] = True
    return Profile(labels, stack)


def serialize_profile(profile: Profile) -> str:
    """Canonical text: one ``x > y`` or ``x = y`` line per related pair."""
    labels = profile.labels
    bad = [lab for lab in labels if not _valid_label(lab)]
    if bad:
        raise ProfileFormatError(f"label {bad[0]!r} cannot be written in the profile format")
    lines = ["alternatives: " + " ".join(labels)]
    for R in profile.stack:
        lines.append("individual")
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if R[i, j] and R[j, i]:
                    lines.append(f"{labels[i]} = {labels[j]}")
                elif R[i, j]:
                    lines.append(f"{labels[i]} > {labels[j]}")
                elif R[j, i]:
                    lines.append(f"{labels[j]} > {labels[i]}")
    return "\n".join(lines) + "\n"


def read_profile(path) -> Profile:
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read())


def write_profile(profile: Profile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_profile(profile))
