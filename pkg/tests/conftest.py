from __future__ import annotations

import functools

import pytest

from smgkit.description import build_semigroup, bundled, parse_description

# filled by test_acceptance.py: criterion number -> (title, passed, detail)
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@functools.lru_cache(maxsize=None)
def load(name: str):
    return build_semigroup(parse_description(bundled(name)))


@functools.lru_cache(maxsize=None)
def ev_pipeline(name: str):
    """(S', coordinatization, generators, S^Ev, green data of S^Ev) for a bundled instance."""
    from smgkit.core.green import green_data
    from smgkit.ev import build_ev_generators, build_sev, prepare_gm
    S2, coord = prepare_gm(load(name), strict=False)
    gen = build_ev_generators(S2, coord)
    SEv = build_sev(gen)
    return S2, coord, gen, SEv, green_data(SEv)


@functools.lru_cache(maxsize=None)
def eval_setup(name: str):
    from smgkit.evalengine import setup
    return setup(load(name))


@pytest.fixture(scope="session")
def mtf():
    return load("mtf")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        line = f"criterion {k} [{title}]: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
