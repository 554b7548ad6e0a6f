"""Command-line interface: analyze, verify, and certificate workflows.

Exit codes: 0 success, 1 verification or certification failure, 2 input
error, 3 rewrite inapplicable (gap coalitions share no player).
"""

import json
import os
import sys
from typing import Optional

import click

from . import data, decompose, lowerbound, sweep
from .games import Coalition, WeightedGame, all_of

EXIT_FAILURE = 1
EXIT_INAPPLICABLE = 3


def _workers(threads: Optional[int]) -> int:
    if threads is not None:
        if threads < 1:
            raise click.UsageError("--threads must be >= 1")
        return threads
    return os.cpu_count() or 1


def _load_table(data_ref: str) -> data.PopulationTable:
    if data_ref.startswith("builtin:"):
        year = data_ref[len("builtin:") :]
        try:
            return data.builtin_table(year)
        except KeyError as e:
            raise click.UsageError(str(e.args[0]))
    try:
        with open(data_ref, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise click.UsageError(f"cannot read {data_ref}: {e.strerror}")
    try:
        return data.load_table(text, label=data_ref)
    except ValueError as e:
        raise click.UsageError(f"{data_ref}: {e}")


def _parse_exclude(exclude: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in exclude.split(",") if s.strip())


def _build_rule(
    table: data.PopulationTable,
    excluded: tuple[str, ...],
    quota_member_count: Optional[int] = None,
) -> data.EuRule:
    try:
        return data.build_eu_rule(
            table, exclude=excluded, quota_member_count=quota_member_count
        )
    except ValueError as e:
        raise click.UsageError(str(e))


def _labels(rule: data.EuRule, coalitions) -> list[list[int]]:
    return [list(rule.label_members(s.mask)) for s in coalitions]


def _game_row(game: WeightedGame) -> dict:
    return {"quota": game.quota, "weights": list(game.weights)}


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _gap_section(rule: data.EuRule, gap: decompose.GapSummary) -> dict:
    section = {
        "count": gap.count,
        "common_core": list(rule.label_members(gap.common_core.mask)),
        "min_weight_scaled": gap.min_weight,
        "boost_scaled": gap.boost,
        "boost_population_units": (
            None if gap.boost is None else _ceil_div(gap.boost, rule.scale)
        ),
        "members": None if gap.members is None else _labels(rule, gap.members),
    }
    return section


def _alternate_section(
    table: data.PopulationTable,
    excluded: tuple[str, ...],
    main_rule: data.EuRule,
    swap_roles: bool,
    gap_cap: int,
    workers: int,
) -> Optional[dict]:
    """The retained-quota reading, reported whenever it differs.

    When members are excluded, the counting quotas can either be re-derived
    from the smaller membership (the main report) or retained from the full
    table; the two readings disagree on the rule, so the report carries the
    second one's outcome as well.
    """
    full_m = table.member_count
    cfg = main_rule.config
    if (cfg.member_quota(full_m), cfg.veto_quota(full_m)) == (
        main_rule.member_quota,
        main_rule.veto_quota,
    ):
        return None
    try:
        rule = data.build_eu_rule(table, exclude=excluded, quota_member_count=full_m)
    except ValueError as e:
        return {"error": str(e)}
    section = {
        "member_quota": rule.member_quota,
        "veto_quota": rule.veto_quota,
    }
    first, second = rule.population_game, rule.veto_game
    if swap_roles:
        first, second = second, first
    try:
        dec = decompose.union_as_intersection(first, second, gap_cap, workers)
    except decompose.EmptyCoreError as e:
        section.update(
            {
                "method": "inapplicable",
                "gap_count": e.gap.count,
                "common_core": [],
                "frontier_count": None,
                "bound": None,
            }
        )
        return section
    section.update(
        {
            "method": dec.method,
            "gap_count": dec.gap.count,
            "common_core": list(rule.label_members(dec.gap.common_core.mask)),
            "frontier_count": len(dec.frontier),
            "bound": 1 + len(dec.games),
        }
    )
    return section


def _render_text(report: dict) -> str:
    lines = []
    lines.append(f"dataset: {report['dataset']} ({report['members']} members)")
    if report["excluded"]:
        lines.append("excluded: " + ", ".join(report["excluded"]))
    rule = report["rule"]
    lines.append(
        f"rule: member quota {rule['member_quota']}, population quota "
        f"{rule['population_quota_scaled']} of {rule['scale']}x{rule['total_population']} "
        f"(scaled), veto quota {rule['veto_quota']}"
    )
    if report["swap_roles"]:
        lines.append("roles: swapped (veto game is the boosted side)")
    gap = report["gap"]
    lines.append(f"gap coalitions: {gap['count']}")
    if gap["count"]:
        lines.append("common core: " + _join(gap["common_core"]))
        lines.append(
            f"boost: {gap['boost_scaled']} scaled units "
            f"({gap['boost_population_units']} population units, ceiling)"
        )
        if gap["members"] is not None:
            for members in gap["members"]:
                lines.append("  gap: " + _join(members))
    lines.append(f"frontier coalitions: {report['frontier_count']}")
    for members in report["frontier"]:
        lines.append("  frontier: " + _join(members))
    lines.append(f"method: {report['method']}")
    lines.append(f"bound: {report['bound']}")
    alt = report["alternate_quota_reading"]
    if alt is not None:
        if "error" in alt:
            lines.append(f"alternate quota reading: invalid ({alt['error']})")
        else:
            lines.append(
                f"alternate quota reading (retained quotas {alt['member_quota']}/"
                f"{alt['veto_quota']}): method {alt['method']}, gap {alt['gap_count']}, "
                f"frontier {alt['frontier_count']}, bound {alt['bound']}"
            )
    lines.append("games:")
    for game in report["games"]:
        lines.append(f"  [{game['quota']}; {_join(game['weights'])}]")
    return "\n".join(lines) + "\n"


def _join(values) -> str:
    return ",".join(str(v) for v in values)


@click.group()
def main() -> None:
    """Dimension bounds for qualified-majority voting rules."""


_data_option = click.option(
    "--data",
    "data_ref",
    required=True,
    help="CSV path or builtin:<2014|2016|2017|2018>.",
)
_exclude_option = click.option(
    "--exclude",
    default="",
    help="Comma-separated country names to drop from the table.",
)
_threads_option = click.option(
    "--threads",
    type=int,
    default=None,
    help="Worker threads (default: available parallelism); results do not depend on it.",
)


@main.command()
@_data_option
@_exclude_option
@_threads_option
@click.option("--json", "as_json", is_flag=True, help="Emit the machine-readable report.")
@click.option(
    "--swap-roles",
    is_flag=True,
    help="Boost the veto game instead of the population game.",
)
@click.option(
    "--gap-cap",
    type=int,
    default=decompose.GAP_MEMBER_CAP,
    show_default=True,
    help="Materialize gap members only up to this count.",
)
def analyze(
    data_ref: str,
    exclude: str,
    threads: Optional[int],
    as_json: bool,
    swap_roles: bool,
    gap_cap: int,
) -> None:
    """Rewrite the rule as an intersection and report the dimension bound."""
    workers = _workers(threads)
    excluded = _parse_exclude(exclude)
    table = _load_table(data_ref)
    rule = _build_rule(table, excluded)
    first, second = rule.population_game, rule.veto_game
    if swap_roles:
        first, second = second, first
    try:
        dec = decompose.union_as_intersection(first, second, gap_cap, workers)
    except decompose.EmptyCoreError as e:
        click.echo(
            f"rewrite inapplicable: {e.gap.count} gap coalitions share no player",
            err=True,
        )
        sys.exit(EXIT_INAPPLICABLE)
    games = (rule.count_game,) + dec.games
    report = {
        "dataset": data_ref,
        "excluded": sorted(excluded),
        "members": rule.n,
        "country_labels": list(rule.labels),
        "rule": {
            "member_quota": rule.member_quota,
            "veto_quota": rule.veto_quota,
            "population_quota_scaled": rule.population_game.quota,
            "scale": rule.scale,
            "total_population": rule.total_population,
            "member_fraction": str(rule.config.member_fraction),
            "population_fraction": str(rule.config.population_fraction),
            "blocking_minority": rule.config.blocking_minority,
        },
        "swap_roles": swap_roles,
        "gap": _gap_section(rule, dec.gap),
        "frontier": _labels(rule, dec.frontier),
        "frontier_count": len(dec.frontier),
        "method": dec.method,
        "games": [_game_row(g) for g in games],
        "bound": 1 + len(dec.games),
        "alternate_quota_reading": _alternate_section(
            table, excluded, rule, swap_roles, gap_cap, workers
        ),
        "verification": None,
    }
    if as_json:
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    else:
        click.echo(_render_text(report), nl=False)


@main.command()
@_data_option
@_exclude_option
@_threads_option
@click.option("--boost-offset", type=int, default=0, hidden=True)
def verify(
    data_ref: str, exclude: str, threads: Optional[int], boost_offset: int
) -> None:
    """Exhaustively check the emitted intersection against the rule."""
    workers = _workers(threads)
    excluded = _parse_exclude(exclude)
    rule = _build_rule(_load_table(data_ref), excluded)
    try:
        dec = decompose.union_as_intersection(
            rule.population_game,
            rule.veto_game,
            workers=workers,
            boost_offset=boost_offset,
        )
    except decompose.EmptyCoreError as e:
        click.echo(
            f"rewrite inapplicable: {e.gap.count} gap coalitions share no player",
            err=True,
        )
        sys.exit(EXIT_INAPPLICABLE)
    emitted = all_of(rule.count_game, *dec.games)
    result = sweep.equivalent(rule.expr, emitted, workers)
    if result:
        click.echo(
            f"verification passed: the {1 + len(dec.games)} games match the rule "
            f"on all {1 << rule.n} coalitions"
        )
        return
    witness = result.counterexample
    assert witness is not None
    side = "rule" if rule.expr.evaluate(witness) else "emitted intersection"
    click.echo(
        "verification FAILED: coalition "
        f"{{{_join(rule.label_members(witness.mask))}}} wins only the {side}",
        err=True,
    )
    sys.exit(EXIT_FAILURE)


@main.group(name="lower-bound")
def lower_bound() -> None:
    """Certificate workflows for dimension lower bounds."""


def _read_coalition_file(path: str, rule: data.EuRule) -> list[Coalition]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise click.UsageError(f"cannot read {path}: {e.strerror}")
    coalitions = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            ranks = [int(tok) for tok in body.split(",")]
            mask = rule.mask_from_labels(ranks)
        except ValueError as e:
            raise click.UsageError(f"{path}:{lineno}: {e}")
        coalitions.append(Coalition(mask, rule.n))
    if not coalitions:
        raise click.UsageError(f"{path}: no coalitions found")
    return coalitions


def _echo_certificate_report(
    rule: data.EuRule, report: lowerbound.CertificateSetReport
) -> None:
    for idx, (s, losing) in enumerate(zip(report.coalitions, report.losing), start=1):
        status = "losing" if losing else "WINNING (not admissible)"
        click.echo(f"coalition {idx}: {{{_join(rule.label_members(s.mask))}}} {status}")
    for outcome in report.pairs:
        tag = f"pair ({outcome.i + 1},{outcome.j + 1}): {outcome.status}"
        if outcome.certificate is not None:
            cert = outcome.certificate
            tag += (
                f"  p={{{_join(rule.label_members(cert.p.mask))}}}"
                f"  q={{{_join(rule.label_members(cert.q.mask))}}}"
            )
        click.echo(tag)
    if report.lower_bound is not None:
        click.echo(f"certified lower bound: {report.lower_bound}")
    else:
        click.echo("set not fully certified: no lower bound claimed")


@lower_bound.command(name="verify")
@_data_option
@_exclude_option
@_threads_option
@click.option(
    "--coalitions",
    "coalitions_path",
    required=True,
    help="File with one coalition per line: comma-separated 1-based ranks, # comments.",
)
@click.option(
    "--delta-cap",
    type=int,
    default=lowerbound.DELTA_CAP,
    show_default=True,
    help="Skip pairs whose symmetric difference exceeds this many players.",
)
def lower_bound_verify(
    data_ref: str,
    exclude: str,
    threads: Optional[int],
    coalitions_path: str,
    delta_cap: int,
) -> None:
    """Check that a coalition set is losing and pairwise incompatible."""
    workers = _workers(threads)
    rule = _build_rule(_load_table(data_ref), _parse_exclude(exclude))
    coalitions = _read_coalition_file(coalitions_path, rule)
    try:
        report = lowerbound.verify_certificate_set(
            rule.expr, coalitions, delta_cap, workers
        )
    except ValueError as e:
        raise click.UsageError(str(e))
    _echo_certificate_report(rule, report)
    if report.lower_bound is None:
        sys.exit(EXIT_FAILURE)


@lower_bound.command(name="search")
@_data_option
@_exclude_option
@_threads_option
@click.option("--budget", type=int, default=64, show_default=True, help="Candidate pool size.")
@click.option(
    "--pair-budget",
    type=int,
    default=2000,
    show_default=True,
    help="Maximum pair searches during the greedy pass.",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--delta-cap", type=int, default=lowerbound.DELTA_CAP, show_default=True)
def lower_bound_search(
    data_ref: str,
    exclude: str,
    threads: Optional[int],
    budget: int,
    pair_budget: int,
    seed: int,
    delta_cap: int,
) -> None:
    """Search for a pairwise-incompatible losing set (best effort)."""
    workers = _workers(threads)
    rule = _build_rule(_load_table(data_ref), _parse_exclude(exclude))
    try:
        report = lowerbound.search_certificate_set(
            rule.expr,
            pool_budget=budget,
            pair_budget=pair_budget,
            seed=seed,
            delta_cap=delta_cap,
            workers=workers,
        )
    except ValueError as e:
        raise click.UsageError(str(e))
    _echo_certificate_report(rule, report)
    if report.lower_bound is None:
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
