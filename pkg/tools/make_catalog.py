"""Search representative permutations for the catalogued components.

Usage: python tools/make_catalog.py > src/kzspectra/data/catalog.txt

For each target (stratum, label) random irreducible permutations on
2g+k-1 letters are drawn until one has the right singularity data, spin
parity and hyperellipticity; among the first few hits the one with the
lexicographically smallest bottom row is kept. Hyperelliptic components use
the reversal permutation directly.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from topology import is_hyperelliptic, spin_parity  # noqa: E402

from kzspectra.exchange import Permutation, singularity_data  # noqa: E402
from kzspectra.strata import Stratum, parse_component_id  # noqa: E402

TARGETS = [
    # genus 2
    "H(2)^hyp", "H(1,1)^hyp",
    # genus 3
    "H(4)^hyp", "H(4)^odd", "H(3,1)", "H(2,2)^hyp", "H(2,2)^odd", "H(2,1,1)", "H(1,1,1,1)",
    # genus 4
    "H(6)^hyp", "H(6)^even", "H(6)^odd", "H(5,1)", "H(3,3)^hyp", "H(3,3)^nonhyp",
    "H(4,2)^even", "H(4,2)^odd", "H(2,2,2)^odd", "H(3,2,1)", "H(2,2,2)^even",
    "H(3,1,1,1)", "H(2,2,1,1)", "H(2,1,1,1,1)", "H(1,1,1,1,1,1)",
    # genus 5
    "H(8)^hyp", "H(8)^even", "H(8)^odd", "H(5,3)", "H(6,2)^odd", "H(4,4)^hyp",
    "H(7,1)", "H(6,2)^even", "H(6,1,1)", "H(5,2,1)", "H(5,1,1,1)",
]

LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def matches(perm: Permutation, stratum: Stratum, label: str | None) -> bool:
    if singularity_data(perm) != stratum:
        return False
    if label is None:
        return True
    hyp = is_hyperelliptic(perm)
    if label == "hyp":
        return hyp
    if hyp:
        return False
    if label == "nonhyp":
        return True
    return spin_parity(perm) == (1 if label == "odd" else 0)


def search(ident: str, rng: random.Random, hits: int = 5, budget: int = 2_000_000) -> Permutation:
    stratum, label = parse_component_id(ident)
    n = stratum.dimension
    top = tuple(LETTERS[:n])
    if label == "hyp":
        return Permutation(top, top[::-1])
    found = []
    for _ in range(budget):
        bot = list(top)
        rng.shuffle(bot)
        # standard permutations: first top letter is last on the bottom and vice versa
        if bot[-1] != top[0] or bot[0] != top[-1]:
            i, j = bot.index(top[0]), bot.index(top[-1])
            bot[i], bot[-1] = bot[-1], bot[i]
            j = bot.index(top[-1])
            bot[j], bot[0] = bot[0], bot[j]
        perm = Permutation(top, tuple(bot))
        if perm.is_irreducible() and matches(perm, stratum, label):
            found.append(perm)
            if len(found) >= hits:
                break
    if not found:
        raise RuntimeError(f"no representative found for {ident}")
    return min(found, key=lambda p: p.bottom)


def main():
    rng = random.Random(20141008)
    print("# kzspectra component catalog")
    print("# version: 1")
    print("# component | representative permutation (top / bottom)")
    print("# representatives found by tools/make_catalog.py; labels audited by")
    print("# tools/topology.py (Arf invariant, hyperelliptic Rauzy class)")
    for ident in TARGETS:
        perm = search(ident, rng)
        print(f"{ident:<16}| {perm}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
