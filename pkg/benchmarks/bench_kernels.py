"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are called directly, so LORENTZFP_PURE has no effect here.
"""
import argparse
import timeit

from lorentzfp import _fallback
from lorentzfp.arith import primes_up_to
from lorentzfp.finlorentz import _entries, group_order, standard_generators

try:
    from lorentzfp import _core
except ImportError:
    _core = None


def cases():
    gens7 = [_entries(g) for g in standard_generators(7)]
    cap = group_order(7) + 1
    # depth 97 has no candidate in this window, so the whole block is scanned
    qs = [q for q in primes_up_to(97) if q > 2]
    start = 2_097_159
    return {
        "bfs_closure(p=7)": lambda m: m.bfs_closure(gens7, 7, cap),
        "lorentz_frames(p=7)": lambda m: m.lorentz_frames(7),
        "first_chain_candidate(depth 97, 200k)": lambda m: m.first_chain_candidate(start, 200_000, qs),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = {"python": _fallback}
    if _core is not None:
        backends["compiled"] = _core
    else:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':40s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for name, fn in cases().items():
        results = {b: fn(m) for b, m in backends.items()}
        if len(results) == 2 and results["python"] != results["compiled"]:
            raise SystemExit(f"{name}: backends disagree")
        times = {b: min(timeit.repeat(lambda m=m: fn(m), number=1, repeat=args.repeat))
                 for b, m in backends.items()}
        speedup = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:40s} " + " ".join(f"{t:10.4f}" for t in times.values()) + f"   {speedup:6.1f}x")


if __name__ == "__main__":
    main()
