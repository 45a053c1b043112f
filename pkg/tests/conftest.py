from __future__ import annotations

from pathlib import Path

import pytest

import jsontape
from jsontape.bits import mask_from_row
from jsontape.generate import generate

CORPUS_DIR = Path(__file__).parent / "corpus"
SAMPLE = (CORPUS_DIR / "photo.json").read_bytes()

# the 64-byte worked example used for the stage-1 mask rows
EXAMPLE_INPUT = rb'{ "\\\"Nam[{": [ 116,"\\\\" , 234, "true", false ], "t":"\\\"" }'
EXAMPLE_ROWS = {
    "B": "___111________________1111_______________________________111____",
    "S_starts": "___1__________________1__________________________________1______",
    "ES": "______________________1_________________________________________",
    "EC": "___111____________________1______________________________111____",
    "ECE": "__________________________1_____________________________________",
    "OD1": "________________________________________________________________",
    "OS": "___1_____________________________________________________1______",
    "OC": "______1_______________1111__________________________________1___",
    "OCE": "______1_____________________________________________________1___",
    "OD2": "______1_____________________________________________________1___",
    "OD": "______1_____________________________________________________1___",
    "Q_raw": "__1___1_____1________1____1________1____1___________1_1_1___11__",
    "Q": "__1_________1________1____1________1____1___________1_1_1____1__",
    "R": "__1111111111_________11111_________11111____________11__11111___",
    "S": "1_________11_1_1____1_______1____1_______1_______11____1_______1",
    "W": "_1____________1_1__________1_1____1_______1_____1__1__________1_",
    "S_outside": "1____________1_1____1_______1____1_______1_______11____1_______1",
    "S_with_quotes": "1_1_________11_1____11____1_1____1_1____11_______11_1_111____1_1",
    "P_candidates": "111_________11111___11____1111___111____111_____11111_111____111",
    "P_shifted": "_111_________11111___11____1111___111____111_____11111_111____11",
    "P": "_____________1_1_1__________1_1__________1_1_____11____1_______1",
    "S_merged": "1_1_________11_1_1__11____1_1_1__1_1____11_1_____11_1_111____1_1",
    "final": "1_1__________1_1_1__11______1_1__1_1_____1_1_____11_1__11______1",
}
EXAMPLE_MASKS = {k: mask_from_row(v) for k, v in EXAMPLE_ROWS.items()}

BACKENDS = jsontape.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def small_corpus() -> dict[str, bytes]:
    """Corpus files small enough for every backend."""
    return {
        "sample": SAMPLE,
        "numbers": generate("numbers", 300, 1).data,
        "random-mixed": generate("random-mixed", 20, 2).data,
        "random-mixed-pretty": generate("random-mixed", 10, 3, indent=2).data,
        "escaped-strings": generate("escaped-strings", 20, 4).data,
        "large-slice": generate("large", 40_000, 5).data,
    }


# one line per acceptance criterion, shown at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
