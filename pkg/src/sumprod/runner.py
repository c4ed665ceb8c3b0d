"""Dispatch an :class:`ExperimentConfig` to the module operations and assemble a report."""

from __future__ import annotations

import sys
import time
from pathlib import Path

from . import acceptance
from .energy import (
    T_ratio_report,
    collinear_triples,
    energy_ratio_report,
    mult_energy,
    phi_energy,
    sigma_X,
)
from .exact import ExactSet, card_prodset, card_quotset
from .extremal import (
    SWEEP_COLUMNS,
    build_clique_instance,
    clique_oracle,
    difference_condition,
    equality_flag,
    geometric_progression_example,
    max_clique,
    paley13_verdict,
    subgroup_difference_sweep,
)
from .field import (
    FpSet,
    PrimeCtx,
    check_many_shifts_bound,
    check_subgroup_accounting,
    check_subgroup_formula,
    fp_collinear_triples,
    fp_dd_chain_report,
    fp_ratio_set,
    fp_sandwich,
    fp_triples_report,
    make_subgroup,
)
from .generate import ConfigError, ExperimentConfig, generate
from .incidence import (
    D_PHI_NOTE,
    MonotoneMap,
    check_rich_accounting,
    convex_sample_verdict,
    d_tilde_plus,
    d_times_upper_for_ratio_set,
    sample_D_lower,
)
from .inequalities import plunnecke_check, ruzsa_triangle_check, sumset_lower_check
from .ratio import (
    check_dyadic,
    check_inverse_identity,
    check_negation_trick,
    check_reflection_identity,
    dd_chain_report,
    dyadic_partition,
    question_row,
    ratio_set,
    sandwich,
    sigma_chain,
)
from .report import Report, Verdict, rows_to_csv

COMMANDS = ("sets", "energy", "triples", "ratio", "szt", "subgroup", "clique", "sweep", "extremal", "verify-all", "verify-identities")


def _sets(cfg: ExperimentConfig) -> dict:
    return {name: generate(spec, cfg.seed) for name, spec in cfg.sets.items()}


def _need(sets: dict, name: str):
    if name not in sets:
        raise ConfigError(f"command needs an input set {name!r}")
    return sets[name]


def _int(cfg: ExperimentConfig, key: str, default=None) -> int:
    v = cfg.params.get(key, default)
    if v is None:
        raise ConfigError(f"missing parameter {key!r}")
    return int(v)


def _cmd_sets(cfg, rep: Report):
    s = _sets(cfg)
    A = _need(s, "A")
    B = s.get("B", A)
    if isinstance(A, FpSet):
        for name, op in (("A+B", A + B), ("A-B", A - B), ("AB", A * B), ("A/B", A / B)):
            rep.add({"quantity": f"|{name}|", "value": len(op)})
        return
    rep.add({"quantity": "|A|", "value": len(A)})
    rep.add({"quantity": "|B|", "value": len(B)})
    for name, size in (("A+B", len(A + B)), ("A-B", len(A - B)), ("AB", card_prodset(A, B)), ("A/B", card_quotset(A, B))):
        rep.add({"quantity": f"|{name}|", "value": size})
    if len(A) <= 64 and len(B) <= 64:
        rep.add({"quantity": "A+B", "value": (A + B).to_json()})
    if not (len(A) and len(B)):
        rep.notes.append("empty input: inequality checks skipped")
        return
    rep.check(sumset_lower_check(A, B))
    n, m = _int(cfg, "n", 1), _int(cfg, "m", 1)
    rep.check(plunnecke_check(A, B, n, m))
    if "C" in s and len(s["C"]):
        rep.check(ruzsa_triangle_check(A, B, s["C"]))


def _cmd_energy(cfg, rep: Report):
    s = _sets(cfg)
    A = _need(s, "A")
    B = s.get("B", A)
    if not len(A):
        rep.add({"quantity": "E^x(A)", "value": 0})
        rep.notes.append("empty input")
        return
    rep.add({"quantity": "E^x(A,B)", "value": mult_energy(A, B)})
    rep.add({"quantity": "E_add(A,B)", "value": phi_energy(A, B, "add")})
    rep.add({"quantity": "E_mul(A,B)", "value": phi_energy(A, B, "mul")})
    rep.add(energy_ratio_report(A))
    if len(A) >= 2:
        X = ExactSet(x for x in A - A if x != 0)
        sig = sigma_X(A, X)
        n = len(A)
        rep.add({"quantity": "sigma_{(A-A)\\{0}}(A)", "value": sig})
        rep.check(Verdict("energy.sigma-full", sig == n * n - n, {"sigma": sig, "|A|^2-|A|": n * n - n}))
    rep.check(check_rich_accounting(A, B))


def _cmd_triples(cfg, rep: Report):
    s = _sets(cfg)
    A = _need(s, "A")
    threads = _int(cfg, "threads", 1)
    if isinstance(A, FpSet):
        rep.add(fp_triples_report(A))
        if len(A) <= 8:
            fast, slow = fp_collinear_triples(A), fp_collinear_triples(A, "oracle")
            rep.check(Verdict("fp.triples-oracle", fast == slow, {"fast": fast, "oracle": slow}))
        return
    if len(A) < 2:
        rep.add({"quantity": "T(A)", "value": collinear_triples(A)})
        return
    rep.add(T_ratio_report(A, threads=threads))
    if len(A) <= 8:
        fast, slow = collinear_triples(A, threads=threads), collinear_triples(A, mode="oracle")
        rep.check(Verdict("energy.triples-oracle", fast == slow, {"fast": fast, "oracle": slow}))


def _cmd_ratio(cfg, rep: Report):
    s = _sets(cfg)
    A = _need(s, "A")
    if len(A) < 2:
        rep.add({"quantity": "|R[A]|", "value": None, "note": "R[A] needs |A| >= 2"})
        return
    if isinstance(A, FpSet):
        R = fp_ratio_set(A)
        rep.add({"quantity": "|R[A]|", "value": len(R)})
        for chk in (check_reflection_identity, check_inverse_identity, check_negation_trick):
            rep.check(chk(R))
        v, miss = fp_sandwich(A)
        rep.check(v)
        corr = v.witness["lower"] and set(miss) <= {A.p - 1}
        rep.check(Verdict("ratio.sandwich-minus-one", corr, {"missing": miss[:5]}))
        for f in fp_dd_chain_report(A):
            rep.add(f)
        return
    B = s.get("B")
    R = ratio_set(A, B) if B is not None else ratio_set(A)
    rep.add({"quantity": f"|{R.source}|", "value": len(R)})
    if len(R) <= 200:
        rep.add({"quantity": R.source, "value": R.to_json()})
    rep.check(check_reflection_identity(R))
    if B is None:
        rep.check(check_inverse_identity(R))
        rep.check(check_negation_trick(R))
        sw = sandwich(A)
        rep.check(sw.verdict())
        rep.check(Verdict("ratio.sandwich-lower", sw.lower, {"R": sw.ratio_size, "D/D": sw.quotient_size}))
        rep.check(Verdict("ratio.sandwich-minus-one", sw.lower and set(sw.missing) <= {-1}, {"missing": [str(m) for m in sw.missing[:5]]}))
        rep.check(Verdict("ratio.size-lower", len(R) >= len(A) - 1, {"|R|": len(R), "|A|": len(A)}))
        rep.add({"quantity": "dyadic partition", "value": dyadic_partition(A).to_json()})
        rep.check(check_dyadic(A))
        X = ExactSet(x for x in A - A if x != 0)
        for v in sigma_chain(A, X).verdicts(len(A)):
            rep.check(v)
        for f in dd_chain_report(A):
            rep.add(f)
        if cfg.params.get("explore"):
            rep.add(question_row(A))


def _cmd_szt(cfg, rep: Report):
    s = _sets(cfg)
    A = _need(s, "A")
    if not len(A):
        rep.add({"quantity": "D_phi(A) lower certificate", "value": None, "note": "empty A"})
        return
    phi = cfg.params.get("phi", "add")
    frag, drawn = sample_D_lower(A, phi, samples=_int(cfg, "samples", 100), seed=cfg.seed)
    rep.add(frag)
    rep.notes.append(D_PHI_NOTE)
    if cfg.params.get("convex") and phi == "add":
        rep.check(convex_sample_verdict(A, drawn))
    fmap = cfg.params.get("map")
    if fmap:
        f = MonotoneMap(fmap["kind"], tuple(fmap.get("params", ())))
        C = _need(s, "C")
        rep.add(d_tilde_plus(A, f, list(C), restrict=bool(fmap.get("restrict"))).to_fragment())
    if cfg.params.get("ratio_set") and len(A) >= 2:
        for f in d_times_upper_for_ratio_set(A, s.get("B")):
            rep.add(f)


def _cmd_subgroup(cfg, rep: Report):
    ctx = PrimeCtx.of(_int(cfg, "p"))
    G = make_subgroup(ctx, _int(cfg, "d"))
    xi = _int(cfg, "xi", 1)
    rep.add({"quantity": "subgroup", "value": G.spec(xi), "elements": G.coset(xi).elements if ctx.p <= 1000 else None})
    for v in check_subgroup_accounting(G):
        rep.check(v)
    samples = cfg.params.get("samples", 1000)
    for k in cfg.params.get("k", [1]):
        res = check_subgroup_formula(G, int(k), None if int(k) == 1 else int(samples), cfg.seed)
        rep.check(res.verdict)
        many = check_many_shifts_bound(G, int(k), seed=cfg.seed)
        rep.add({"quantity": f"many-shifts k={k}", "value": many.to_json()})
        if many.verdict is not None:
            rep.check(many.verdict)
        else:
            rep.notes.append(f"k={k}: {many.reason}")


def _cmd_clique(cfg, rep: Report):
    ctx = PrimeCtx.of(_int(cfg, "p"))
    G = make_subgroup(ctx, _int(cfg, "d"))
    inst = build_clique_instance(ctx, G, _int(cfg, "xi", 1))
    res = max_clique(inst, _int(cfg, "budget", 10**6))
    row = res.to_json()
    row.update({"spec": inst.spec(), "allowed_size": len(inst.allowed), "equality_flag": equality_flag(inst, res.best)})
    rep.add(row)
    if not res.optimal:
        rep.notes.append("node budget exhausted: size is an incumbent, not a certified optimum")
    rep.check(difference_condition(inst, res.best))
    if ctx.p <= 61 or len(inst.allowed) <= 20:
        ref = clique_oracle(inst)
        rep.check(Verdict("extremal.clique-oracle", res.optimal and res.size == ref, {"search": res.size, "oracle": ref}))


def _cmd_sweep(cfg, rep: Report):
    sweep = subgroup_difference_sweep(
        _int(cfg, "p_min", 3),
        _int(cfg, "p_max", 61),
        cfg.params.get("orders", "all"),
        cfg.params.get("xi", "coset-reps"),
        _int(cfg, "budget", 10**6),
    )
    for r in sweep.rows:
        rep.add(r)
    for v in sweep.verdicts:
        rep.check(v)
    if any(r["p"] == 13 and r["d"] == 6 for r in sweep.rows):
        rep.check(paley13_verdict(sweep))
    if any(not r["optimal"] for r in sweep.rows):
        rep.notes.append("some rows are budget-limited incumbents (optimal=false)")
    csv_path = cfg.params.get("csv") or (str(Path(cfg.out).with_suffix(".csv")) if cfg.out else None)
    if csv_path:
        Path(csv_path).write_text(rows_to_csv(sweep.rows, SWEEP_COLUMNS))
        rep.notes.append(f"sweep table written to {csv_path}")


def _cmd_extremal(cfg, rep: Report):
    ns = cfg.params.get("n", 3)
    for n in ns if isinstance(ns, list) else [ns]:
        frags, verdicts = geometric_progression_example(int(n))
        for f in frags:
            row = f.to_json()
            row["n"] = int(n)
            rep.add(row)
        for v in verdicts:
            rep.check(v)


def _criteria_to_report(results, rep: Report):
    for res in results:
        row = res.to_json()
        row.pop("seconds")
        row["in_time"] = res.in_time
        rep.add(row)
        rep.check(Verdict("runner.criterion", res.ok, {"criterion": res.number, "title": res.title}))
        print(res.line(), file=sys.stderr)


def _cmd_verify_all(cfg, rep: Report):
    budget = float(cfg.params.get("time_budget", 1800))
    golden = cfg.params.get("golden")
    only = cfg.params.get("only")
    start = time.perf_counter()
    results = []
    for k in acceptance.CRITERIA:
        if only and k not in only:
            continue
        if time.perf_counter() - start > budget:
            rep.check(Verdict("runner.criterion", False, {"criterion": k, "title": "not run: wall-clock budget exhausted"}))
            continue
        results.extend(acceptance.run_all(cfg.seed, golden, only=[k]))
    _criteria_to_report(results, rep)


def _cmd_verify_identities(cfg, rep: Report):
    res = acceptance.criterion_1(cfg.seed, _int(cfg, "rational_sets", 100), _int(cfg, "field_sets", 40))
    rep.add({"quantity": "identity verdict counts", "value": res.details})
    for f in res.failures:
        rep.notes.append(f)
    rep.check(Verdict("runner.criterion", res.passed, {"criterion": 1, "title": res.title}))


HANDLERS = {
    "sets": _cmd_sets,
    "energy": _cmd_energy,
    "triples": _cmd_triples,
    "ratio": _cmd_ratio,
    "szt": _cmd_szt,
    "subgroup": _cmd_subgroup,
    "clique": _cmd_clique,
    "sweep": _cmd_sweep,
    "extremal": _cmd_extremal,
    "verify-all": _cmd_verify_all,
    "verify-identities": _cmd_verify_identities,
}


def run(cfg: ExperimentConfig) -> Report:
    """Deterministic given (config, seed); invalid configs raise :class:`ConfigError`."""
    if cfg.command not in HANDLERS:
        raise ConfigError(f"unknown command {cfg.command!r}; choose from {', '.join(COMMANDS)}")
    rep = Report(cfg.command, cfg.to_json(), cfg.seed)
    HANDLERS[cfg.command](cfg, rep)
    return rep
