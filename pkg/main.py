#!/usr/bin/env python3
"""
randlab - randomized algorithms lab
CLI for the verification harness and the structures behind it
"""
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click
import pandas as pd
import yaml
from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src import __version__
from src.audit import AuditTrail
from src.classic import karger_amplified, karger_repetitions
from src.cms import CmsParams, CountMinSketch, HeavyHitterTracker
from src.cuckoo import CuckooTable
from src.errors import RandlabError
from src.fks import FksTable
from src.harness import SUITE_ORDER, ExperimentRunner, ExperimentSpec
from src.hashfam import FAMILIES, sample_family
from src.input_parser import DatasetParser
from src.lsh import build_nns_ladder, linear_scan_nearest
from src.randsrc import RandomSource, parse_seed
from src.report import report_emit
from src.skiplist import SkipList
from src.treap import Treap


# Load environment variables
load_dotenv()

# status lines go to stderr so reports on stdout stay machine-readable
console = Console(stderr=True)

FORMAT_SUFFIX = {'json': '.json', 'csv': '.csv', 'text': '.txt'}
BENCH_STRUCTURES = ('treap', 'skiplist', 'cuckoo', 'fks')


def load_config(config_path: Optional[str] = None) -> dict:
    """Load configuration from YAML file (RANDLAB_CONFIG names an alternative)"""
    path = Path(config_path or os.environ.get('RANDLAB_CONFIG', 'config.yaml'))
    if not path.exists() and not path.is_absolute():
        bundled = Path(__file__).resolve().parent / path
        if bundled.exists():
            path = bundled
    with open(path, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


def resolve_seed(cfg: dict, seed: Optional[str]) -> int:
    """--seed, then RANDLAB_SEED, then randsrc.seed"""
    if seed is not None:
        return parse_seed(seed)
    if os.environ.get('RANDLAB_SEED'):
        return parse_seed(os.environ['RANDLAB_SEED'])
    return parse_seed(cfg.get('randsrc', {}).get('seed', 0))


def root_source(cfg: dict, seed: Optional[str]) -> RandomSource:
    return RandomSource(resolve_seed(cfg, seed), block_words=cfg.get('randsrc', {}).get('block_words', 256))


def display_welcome():
    console.print(Panel.fit(
        f"[bold cyan]randlab {__version__}[/bold cyan]\n"
        "Randomized algorithms, hash tables and sketches with a seeded verification harness",
        border_style="cyan"
    ))


def display_config_info(cfg: dict):
    table = Table(title="Configuration", show_header=True)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Seed", f"{resolve_seed(cfg, None):#x}")
    table.add_row("Philox block words", str(cfg.get('randsrc', {}).get('block_words', 256)))
    table.add_row("Sigma", str(cfg.get('harness', {}).get('sigma', 3.0)))
    table.add_row("Output path", str(cfg.get('output', {}).get('base_path', 'output')))
    table.add_row("Audit trail", str(cfg.get('output', {}).get('audit', True)))
    console.print(table)


def display_verdicts(reports):
    table = Table(title="Verdicts", show_header=True)
    table.add_column("Suite", style="cyan")
    table.add_column("Metric")
    table.add_column("Observed", justify="right")
    table.add_column("Predicted", justify="right")
    table.add_column("Tol", justify="right")
    table.add_column("Pass")
    for report in reports:
        for m in report.metrics:
            mark = "[green]✓[/green]" if m.passed else "[red]✗[/red]"
            table.add_row(report.suite, m.name, f"{m.observed:.6g}", f"{m.predicted:.6g}",
                          f"{m.comparison} {m.tolerance:.3g}", mark)
    console.print(table)


def _scalar_or_list(values: Tuple) -> Any:
    return values[0] if len(values) == 1 else list(values)


@click.group()
@click.version_option(__version__, prog_name='randlab')
def cli():
    """randlab - randomized algorithms lab"""
    pass


@cli.command()
@click.argument('suite')
@click.option('--n', 'n', type=int, multiple=True, help='Size parameter (repeatable)')
@click.option('--p', 'p', type=float, multiple=True, help='Probability parameter (repeatable)')
@click.option('--eps', type=float, multiple=True, help='Error parameter (repeatable)')
@click.option('--delta', type=float, help='Failure probability')
@click.option('--trials', type=int, help='Trial count, overriding the plan')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv', 'text']), default='json')
@click.option('--out', type=click.Path(), help='Report file (a directory for "all")')
@click.option('--timing', is_flag=True, help='Include runtime_ms in reports')
@click.option('--quiet', is_flag=True, help='No progress bars')
@click.option('--audit/--no-audit', default=None, help='Write an audit trail (default from config)')
@click.option('--config', default=None, help='Path to config file')
def validate(suite: str, n, p, eps, delta, trials, seed, fmt, out, timing, quiet, audit, config):
    """Run a validation suite (or "all") and emit its report"""
    try:
        cfg = load_config(config)
        if quiet:
            cfg.setdefault('harness', {})['show_progress'] = False
        names = SUITE_ORDER if suite == 'all' else [suite]
        if suite != 'all' and suite not in SUITE_ORDER:
            raise click.BadParameter(f"unknown suite {suite!r}; choose from {', '.join(SUITE_ORDER)} or all")

        overrides: Dict[str, Any] = {}
        if suite != 'all':
            if n:
                overrides['n'] = _scalar_or_list(n)
            if p:
                overrides['p'] = _scalar_or_list(p)
            if eps:
                overrides['eps'] = _scalar_or_list(eps)
            if delta is not None:
                overrides['delta'] = delta

        trail = None
        output_cfg = cfg.get('output', {})
        if audit if audit is not None else output_cfg.get('audit', True):
            audit_dir = Path(output_cfg.get('base_path', 'output')) / output_cfg.get('audit_dir', 'audit')
            trail = AuditTrail(cfg, str(audit_dir), console)

        runner = ExperimentRunner(cfg, console=console, audit=trail)
        root_seed = resolve_seed(cfg, seed)
        reports = []
        for name in names:
            spec = ExperimentSpec(suite=name, params=overrides if suite != 'all' else {},
                                  seed=root_seed, trials=trials)
            reports.append(runner.run(spec, timing=timing))

        if out:
            out_path = Path(out)
            if suite == 'all':
                out_path.mkdir(parents=True, exist_ok=True)
                for report in reports:
                    (out_path / f"{report.suite}{FORMAT_SUFFIX[fmt]}").write_text(
                        report_emit(report, fmt), encoding='utf-8')
            else:
                out_path.parent.mkdir(parents=True, exist_ok=True)
                out_path.write_text(report_emit(reports[0], fmt), encoding='utf-8')
            console.print(f"✓ Report written: {out_path}")
        else:
            for report in reports:
                click.echo(report_emit(report, fmt), nl=False)

        display_verdicts(reports)
        if trail is not None:
            trail.finalize()
        passed = all(r.passed for r in reports)
        console.print("✅ All verdicts pass" if passed else "⚠️  Some verdicts failed")
        sys.exit(0 if passed else 1)

    except (RandlabError, click.BadParameter, FileNotFoundError, OSError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


def _bench_ops(structure: str, ops: List[Tuple[str, int, Optional[str]]], src: RandomSource,
               cfg: dict) -> Dict[str, Any]:
    """Replay an operation list; rejected operations are counted, not fatal"""
    structures = cfg.get('structures', {})
    summary: Dict[str, Any] = {'operations': len(ops), 'found': 0, 'rejected': 0}

    if structure == 'fks':
        inserts = {key: payload for op, key, payload in ops if op == 'insert'}
        if any(op == 'delete' for op, _, _ in ops):
            raise RandlabError("fks tables are static; delete is not supported")
        table = FksTable.build(src, list(inserts), list(inserts.values()),
                               slot_factor=structures.get('fks', {}).get('slot_factor', 4))
        summary['found'] = sum(table.lookup(key).found for op, key, _ in ops if op == 'search')
        summary.update(total_slots=table.total_slots, outer_rounds=table.stats.outer_rounds,
                       inner_rounds=table.stats.inner_rounds,
                       max_lookup_evaluations=table.stats.max_lookup_evaluations)
        return summary

    if structure == 'treap':
        target = Treap()
    elif structure == 'skiplist':
        sl_cfg = structures.get('skiplist', {})
        target = SkipList(p=sl_cfg.get('p', 0.5), n_max=sl_cfg.get('n_max', 1 << 20))
    else:
        ck_cfg = structures.get('cuckoo', {})
        target = CuckooTable(src, m_bits=ck_cfg.get('m_bits', 16), key_bits=ck_cfg.get('key_bits', 32),
                             load_limit=ck_cfg.get('load_limit', 0.45),
                             rehash_after_m2=ck_cfg.get('rehash_after_m2', False))

    cost = 0
    for op, key, payload in ops:
        try:
            if op == 'insert':
                if structure == 'cuckoo':
                    target.insert(key, payload, src=src)
                else:
                    target.insert(key, src, payload)
            elif op == 'delete':
                target.delete(key)
            elif structure == 'treap':
                result = target.search(key)
                summary['found'] += result.found
                cost += result.depth
            elif structure == 'skiplist':
                result = target.search(key)
                summary['found'] += result.found
                cost += result.links
            else:
                result = target.lookup(key)
                summary['found'] += result.found
                cost += result.probes
        except RandlabError:
            summary['rejected'] += 1

    summary['size'] = len(target)
    if structure == 'treap':
        summary.update(search_depth_total=cost, rotations=target.stats.rotations,
                       priority_ties=target.stats.priority_ties)
    elif structure == 'skiplist':
        summary.update(search_links_total=cost, link_count=target.stats.link_count, levels=target.level)
    else:
        summary.update(probes_total=cost, displacements=target.stats.displacements,
                       rehashes=target.stats.rehashes, max_probes=target.stats.max_probes)
    return summary


@cli.command()
@click.argument('structure', type=click.Choice(BENCH_STRUCTURES))
@click.option('--ops', 'ops_path', required=True, type=click.Path(), help='Operations file')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--config', default=None, help='Path to config file')
def bench(structure: str, ops_path: str, seed: Optional[str], config: Optional[str]):
    """Replay an operations file against a structure and print its counters"""
    try:
        cfg = load_config(config)
        ops = DatasetParser(cfg, console).load_ops(ops_path)
        summary = _bench_ops(structure, ops, root_source(cfg, seed), cfg)

        table = Table(title=f"bench {structure}", show_header=True)
        table.add_column("Counter", style="cyan")
        table.add_column("Value", justify="right", style="green")
        for key, value in summary.items():
            table.add_row(key, str(value))
        console.print(table)
        click.echo(pd.DataFrame([summary]).to_csv(index=False), nl=False)

    except (RandlabError, FileNotFoundError, OSError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


@cli.group()
def sketch():
    """Count-min sketch commands"""
    pass


@sketch.command()
@click.option('--input', 'input_path', required=True, type=click.Path(), help='Stream file (text or .bin)')
@click.option('--query', 'query_path', required=True, type=click.Path(), help='Indices to estimate')
@click.option('--eps', type=float, help='Additive error factor')
@click.option('--delta', type=float, help='Failure probability')
@click.option('--mode', type=click.Choice(['nonnegative', 'general']), help='Stream mode')
@click.option('--phi', type=float, help='Heavy-hitter fraction (nonnegative mode)')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--config', default=None, help='Path to config file')
def replay(input_path, query_path, eps, delta, mode, phi, seed, config):
    """Feed a stream into a sketch and print point estimates as CSV"""
    try:
        cfg = load_config(config)
        cms_cfg = cfg.get('structures', {}).get('cms', {})
        eps = eps if eps is not None else cms_cfg.get('eps', 0.01)
        delta = delta if delta is not None else cms_cfg.get('delta', 0.01)
        mode = mode or cms_cfg.get('mode', 'nonnegative')
        phi = phi if phi is not None else cms_cfg.get('phi', 0.05)

        parser = DatasetParser(cfg, console)
        updates = parser.load_stream(input_path)
        parser.validate_stream(updates, mode)
        queries = parser.load_queries(query_path)

        params = CmsParams.from_error(eps, delta)
        sk = CountMinSketch(params, root_source(cfg, seed), mode=mode)
        tracker = HeavyHitterTracker(phi) if mode == 'nonnegative' else None
        for index, count in updates:
            if tracker is not None:
                tracker.heavy_update(sk, index, count)
            else:
                sk.update(index, count)

        query = sk.point_query_min if mode == 'nonnegative' else sk.point_query_median
        rows = [{'index': i, 'estimate': query(i)} for i in queries]
        console.print(f"✓ Sketch {params.depth}x{params.width}, {sk.updates} updates, l1={sk.l1}")
        if tracker is not None:
            heavy = ", ".join(f"{i}:{est}" for i, est in tracker.heavy_hitters())
            console.print(f"✓ Heavy hitters (phi={phi}): {heavy or 'none'}")
        click.echo(pd.DataFrame(rows, columns=['index', 'estimate']).to_csv(index=False), nl=False)

    except (RandlabError, FileNotFoundError, OSError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


@cli.group(name='hash')
def hash_group():
    """Hash family commands"""
    pass


@hash_group.command()
@click.option('--family', required=True, type=click.Choice(FAMILIES))
@click.option('--param', 'params', multiple=True, help='KEY=VALUE family parameter (repeatable)')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--format', 'fmt', type=click.Choice(['json', 'hex']), default='json')
@click.option('--config', default=None, help='Path to config file')
def sample(family: str, params, seed, fmt, config):
    """Sample one hash function and print its handle"""
    try:
        cfg = load_config(config)
        parsed: Dict[str, int] = {}
        for item in params:
            key, sep, value = item.partition('=')
            if not sep:
                raise click.BadParameter(f"--param needs KEY=VALUE, got {item!r}")
            parsed[key.strip()] = int(value, 0)
        handle = sample_family(root_source(cfg, seed), family, parsed)
        click.echo(handle.to_json() if fmt == 'json' else handle.to_bytes().hex())
    except (RandlabError, click.BadParameter, ValueError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


@cli.group(name='lsh')
def lsh_group():
    """Locality-sensitive hashing commands"""
    pass


@lsh_group.command()
@click.option('--points', 'points_path', required=True, type=click.Path(), help='Point file')
@click.option('--queries', 'queries_path', required=True, type=click.Path(), help='Query file, same format')
@click.option('--format', 'fmt', type=click.Choice(['hamming', 'l1']), default='hamming')
@click.option('--eps', type=float, help='Approximation factor')
@click.option('--delta', type=float, help='Failure probability')
@click.option('--output', 'output_form', type=click.Choice(['lines', 'csv']), default='lines',
              help='"query_id point_id distance" lines, or CSV with exact distance, rung and probes')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--config', default=None, help='Path to config file')
def query(points_path, queries_path, fmt, eps, delta, output_form, seed, config):
    """Approximate nearest neighbors, with the exact distance alongside"""
    try:
        cfg = load_config(config)
        lsh_cfg = cfg.get('structures', {}).get('lsh', {})
        eps = eps if eps is not None else lsh_cfg.get('eps', 1.0)
        delta = delta if delta is not None else lsh_cfg.get('delta', 0.05)

        parser = DatasetParser(cfg, console)
        points = parser.load_points(points_path, fmt)
        queries = parser.load_points(queries_path, fmt)
        if queries.shape[1] != points.shape[1]:
            raise RandlabError(f"query width {queries.shape[1]} != point width {points.shape[1]}")

        ladder = build_nns_ladder(root_source(cfg, seed), points, eps, delta)
        rows = []
        for qi, q in enumerate(queries):
            answer = ladder.query(q)
            _, exact = linear_scan_nearest(points, q)
            rows.append({'query': qi, 'point': answer.point_id, 'distance': answer.distance,
                         'exact_distance': exact, 'rung': answer.rung, 'probes': answer.probes})
        console.print(f"✓ Ladder of {len(ladder.rungs)} rungs over {len(points)} points")
        if output_form == 'csv':
            click.echo(pd.DataFrame(rows).to_csv(index=False), nl=False)
        else:
            for row in rows:
                click.echo(f"{row['query']} {row['point']} {row['distance']}")

    except (RandlabError, FileNotFoundError, OSError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


@cli.command()
@click.option('--graph', 'graph_path', required=True, type=click.Path(), help='Graph file ("n m" then edges)')
@click.option('--repetitions', type=int, help='Contraction runs (default from --delta)')
@click.option('--delta', type=float, default=0.01, help='Allowed probability of missing the min cut')
@click.option('--seed', help='Root seed, decimal or 0x-hex')
@click.option('--config', default=None, help='Path to config file')
def mincut(graph_path, repetitions, delta, seed, config):
    """Smallest cut over repeated random contractions"""
    try:
        cfg = load_config(config)
        graph = DatasetParser(cfg, console).load_graph(graph_path)
        reps = repetitions or karger_repetitions(graph.vertex_count, delta)
        cut = karger_amplified(root_source(cfg, seed), graph, reps)
        side = sorted(min(cut.partition, key=lambda s: (len(s), min(s))))
        console.print(f"✓ {reps} contraction runs")
        click.echo(f"cut_size={cut.cut_size}")
        click.echo("side=" + " ".join(str(v) for v in side))
    except (RandlabError, FileNotFoundError, OSError) as e:
        console.print(f"\n❌ [red]Error: {e}[/red]")
        sys.exit(1)


@cli.command()
@click.option('--config', default=None, help='Path to config file')
def info(config: Optional[str]):
    """Display configuration and available suites"""
    display_welcome()
    try:
        cfg = load_config(config)
        display_config_info(cfg)

        console.print("\n[bold]Suites (validate all runs them in this order):[/bold]")
        for name in SUITE_ORDER:
            console.print(f"  {name}")

        console.print("\n[bold]Examples:[/bold]")
        console.print("  python main.py validate coupon_collector --trials 2000")
        console.print("  python main.py validate all --out output/results")
        console.print("  python main.py bench treap --ops ops.txt")
        console.print("  python main.py hash sample --family mod_p --param universe_max=1000 --param m=16")

    except FileNotFoundError:
        console.print("❌ config.yaml not found")
        sys.exit(1)


if __name__ == "__main__":
    cli()
