# src/polyrigid/cli.py
'''
CLI entry point for polyrigid.

Results go to stdout as JSON, diagnostics to stderr. Exit codes:
0 ok, 1 not congruent / generic failure, 2 malformed input or non-planar face,
3 rigidity condition violated, 4 unrealizable data, 70 internal contradiction.
'''
from __future__ import annotations

import functools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import click
import numpy as np

from .config import DEFAULT_SEED, get_default_jobs
from .errors import PolyrigidError, StructuralError
from .serialize import (
    bundle_from_json,
    graph_from_json,
    measurements_to_json,
    polygon_realization_to_json,
    polygon_spec_from_json,
    read_json,
    realization_from_json,
    realization_to_json,
    solved_step_to_json,
    step_to_json,
    write_json,
    write_obj,
)

logger = logging.getLogger(__name__)


def _handle_errors(fn):
    '''Turn library errors into a stderr diagnostic and the matching exit code.'''
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PolyrigidError as e:
            click.echo(f'error ({type(e).__name__}): {e}', err=True)
            for key, value in e.context.items():
                click.echo(f'   {key}: {value}', err=True)
            raise SystemExit(e.exit_code)
    return wrapper


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2))


def _load_realization(path: str, graph_path: str | None):
    real, graph = realization_from_json(read_json(path))
    if graph_path is not None:
        graph = graph_from_json(read_json(graph_path))
    if graph is None:
        raise StructuralError(f'{path} has no "graph"; pass --graph', key='graph')
    return real, graph


def _load_graph(data):
    '''Graph from a graph, bundle or realization document.'''
    if 'rotation' in data:
        return graph_from_json(data)
    if 'graph' in data:
        return graph_from_json(data['graph'])
    raise StructuralError('document carries no graph', key='graph')


@click.group()
@click.version_option(version='0.1.0')
@click.option('-v', '--verbose', is_flag=True, help='Debug logging on stderr')
def cli(verbose: bool):
    '''polyrigid - rebuild polyhedra from edge lengths and dihedral angles.'''
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
    )


@cli.command()
@click.argument('realization', type=click.Path(exists=True, dir_okay=False))
@click.option('--graph', 'graph_path', type=click.Path(exists=True, dir_okay=False),
              help='Graph JSON, if the realization file does not embed one')
@click.option('--degrees', is_flag=True, help='Report dihedral angles in degrees')
@_handle_errors
def measure(realization: str, graph_path: str | None, degrees: bool):
    '''Edge lengths and dihedral angles of a realization.'''
    from .reconstruct import measure as measure_realization

    real, graph = _load_realization(realization, graph_path)
    data = measurements_to_json(measure_realization(real, graph))
    if degrees:
        data['angles'] = {k: float(np.degrees(x)) for k, x in data['angles'].items()}
        data['units'] = 'degrees'
    _echo_json(data)


def _reconstruct_file(
    path: str, degrees: bool = False, mode: str = 'general'
) -> tuple[str, dict | None, str | None, int]:
    '''Worker: one bundle file -> (path, realization JSON, error, exit code).'''
    from .reconstruct import reconstruct as run

    try:
        graph, m = bundle_from_json(read_json(path), degrees)
        real = run(graph, m, mode=mode)
        return path, realization_to_json(real, graph), None, 0
    except PolyrigidError as e:
        return path, None, f'{type(e).__name__}: {e}', e.exit_code


@cli.command()
@click.argument('bundles', nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--obj', 'obj_path', type=click.Path(dir_okay=False),
              help='Also write a Wavefront OBJ (single Euclidean input only)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False),
              help='Write <name>.realization.json files here instead of stdout')
@click.option('--jobs', type=int, default=None, help='Worker processes for batch runs')
@click.option('--degrees', is_flag=True, help='Read dihedral angles in degrees')
@click.option('--mode', type=click.Choice(['general', 'convex']), default='general', show_default=True,
              help='convex: rigid-vertex reduction for strictly convex input')
@_handle_errors
def reconstruct(bundles: tuple[str, ...], obj_path: str | None, out_dir: str | None, jobs: int | None,
                degrees: bool, mode: str):
    '''Rebuild the polyhedron described by each input bundle.'''
    from tqdm import tqdm

    if len(bundles) == 1 and out_dir is None:
        from .reconstruct import reconstruct as run

        graph, m = bundle_from_json(read_json(bundles[0]), degrees)
        real = run(graph, m, mode=mode)
        if obj_path:
            write_obj(obj_path, real, graph)
            click.echo(f'OBJ written to {obj_path}', err=True)
        _echo_json(realization_to_json(real, graph))
        return

    if obj_path:
        raise click.UsageError('--obj needs exactly one input bundle')
    if out_dir is None:
        raise click.UsageError('several bundles need --out')
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = jobs or get_default_jobs()

    worst = 0
    failed = 0

    def record(path: str, data: dict | None, error: str | None, code: int) -> None:
        nonlocal worst, failed
        if data is None:
            tqdm.write(f'  Error reconstructing {path}: {error}', file=sys.stderr)
            failed += 1
            worst = max(worst, code)
            return
        stem = Path(path).name.removesuffix('.json').removesuffix('.bundle')
        write_json(out / f'{stem}.realization.json', data)

    with tqdm(total=len(bundles), desc='Reconstructing', unit='solid', file=sys.stderr) as bar:
        if jobs == 1:
            for path in bundles:
                record(*_reconstruct_file(path, degrees, mode))
                bar.update()
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_reconstruct_file, path, degrees, mode) for path in bundles]
                for future in as_completed(futures):
                    record(*future.result())
                    bar.update()

    click.echo(f'Reconstructed {len(bundles) - failed}/{len(bundles)} into {out}', err=True)
    if worst:
        raise SystemExit(worst)


@cli.command()
@click.argument('realization', type=click.Path(exists=True, dir_okay=False))
@click.option('--graph', 'graph_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--strict', is_flag=True, help='Exit 3 when a rigidity condition fails')
@_handle_errors
def check(realization: str, graph_path: str | None, strict: bool):
    '''Check the rigidity hypotheses on a realization.'''
    from .graphcore import degree_census
    from .reconstruct import check_conditions, require_conditions

    real, graph = _load_realization(realization, graph_path)
    report = require_conditions(real, graph) if strict else check_conditions(real, graph)
    vertex_degrees, face_sizes = degree_census(graph)
    _echo_json({
        'convex_faces': report.convex_faces,
        'nonconvex_faces': [list(f) for f in report.nonconvex_faces],
        'partially_flat_vertices': list(report.partially_flat_vertices),
        'collinear_triples': [list(t) for t in report.collinear_triples],
        'flat_edges': [f'{a}-{b}' for a, b in report.flat_edges],
        'reflex_edges': [f'{a}-{b}' for a, b in report.reflex_edges],
        'seven_coplanar': report.seven_coplanar,
        'coplanar_witness': list(report.coplanar_witness),
        'weakly_convex': report.weakly_convex,
        'theorem_main_applies': report.theorem_main_applies,
        'theorem_seven_coplanar_applies': report.theorem_seven_coplanar_applies,
        'vertex_degrees': {str(k): v for k, v in sorted(vertex_degrees.items())},
        'face_sizes': {str(k): v for k, v in sorted(face_sizes.items())},
    })


@cli.command()
@click.argument('source', type=click.Path(exists=True, dir_okay=False))
@click.option('--solve', is_flag=True, help='Also solve every vertex figure (needs a bundle)')
@_handle_errors
def reduce(source: str, solve: bool):
    '''Print the vertex-reduction sequence of a graph.'''
    from .graphcore import reduction_sequence, require_valid, terminal_vertex

    data = read_json(source)
    if solve:
        from .reconstruct import reconstruct as run

        graph, m = bundle_from_json(data)
        trace = run(graph, m, trace=True)
        _echo_json({
            'steps': [solved_step_to_json(s) for s in trace.steps],
            'terminal': solved_step_to_json(trace.terminal),
        })
        return

    graph = require_valid(_load_graph(data))
    steps = reduction_sequence(graph)
    last = steps[-1].reduced if steps else graph
    for step in steps:
        click.echo(
            f'removed {step.removed}: boundary {list(step.boundary)}, '
            f'diagonals {[list(e) for e in step.boundary_diagonals]}',
            err=True,
        )
    _echo_json({'steps': [step_to_json(s) for s in steps], 'terminal': terminal_vertex(last)})


@cli.command()
@click.argument('spec_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--degrees', is_flag=True, help='Read and print angles and lengths in degrees')
@click.option('--convex', is_flag=True, help='Strictly convex polygon: use the convex n-gon solver')
@_handle_errors
def polygon(spec_file: str, degrees: bool, convex: bool):
    '''Solve a spherical polygon from its angles and known side lengths.

    \b
    SPEC_FILE: {"angles": [...], "lengths": [..., null where unknown],
                "convention": "interior-left"}
    '''
    from .reconstruct import solve_vertex_figure

    spec = polygon_spec_from_json(read_json(spec_file), degrees)
    real = solve_vertex_figure(spec, convex=convex)
    data = polygon_realization_to_json(real)
    if degrees:
        data['lengths'] = [float(np.degrees(x)) for x in data['lengths']]
        data['angles'] = [float(np.degrees(x)) for x in data['angles']]
        data['units'] = 'degrees'
    logger.debug('solved %d-gon with %d unknown side(s)', spec.n, len(spec.unknown_indices))
    _echo_json(data)


@cli.command()
@click.argument('first', type=click.Path(exists=True, dir_okay=False))
@click.argument('second', type=click.Path(exists=True, dir_okay=False))
@click.option('--tol', type=float, default=None, help='Congruence tolerance (default POLYRIGID_TOL or 1e-6)')
@_handle_errors
def congruent(first: str, second: str, tol: float | None):
    '''Decide whether two realizations are congruent. Exit 0 if so, 1 if not.'''
    from .geometry3 import congruent as decide

    if tol is not None and not tol > 0:
        raise click.BadParameter('must be positive', param_hint='--tol')
    r1, _ = realization_from_json(read_json(first))
    r2, _ = realization_from_json(read_json(second))
    try:
        result = decide(r1, r2, tol)
    except ValueError as e:
        raise StructuralError(str(e)) from e
    click.echo(result.describe(), err=True)
    _echo_json({
        'congruent': result.congruent,
        'reflected': result.reflected,
        'residual': result.residual,
        'witness': result.witness,
    })
    if not result.congruent:
        raise SystemExit(1)


_TRIG_ARITY = {'sss': 3, 'aaa': 3, 'sas': 3, 'asa': 3, 'classify': 6}


def _triangle_json(t, degrees: bool) -> dict:
    conv = np.degrees if degrees else float
    return {name: float(conv(x)) for name, x in zip(('a', 'b', 'c', 'A', 'B', 'C'), t.as_tuple())}


@cli.command()
@click.option('--mode', type=click.Choice(list(_TRIG_ARITY)), required=True)
@click.option('--degrees', is_flag=True, help='Read and print values in degrees')
@click.argument('values', nargs=-1, type=float)
@_handle_errors
def trig(mode: str, degrees: bool, values: tuple[float, ...]):
    '''Spherical triangle solving.

    \b
    sss: a b c      aaa: A B C      sas: b A c      asa: A c B
    classify: a b c A B C
    '''
    from .sphtrig import (
        SOLVERS,
        SphericalTriangleTuple,
        classify_singular,
        classify_triangle,
        is_singular_angle,
        max_residual,
    )

    if len(values) != _TRIG_ARITY[mode]:
        raise click.UsageError(f'--mode {mode} takes {_TRIG_ARITY[mode]} values, got {len(values)}')
    if degrees:
        values = tuple(float(np.radians(x)) for x in values)

    if mode == 'classify':
        t = SphericalTriangleTuple(*values)
        out = {
            'class': classify_triangle(t).value,
            'residual': max_residual(t),
        }
        if any(is_singular_angle(x) for x in t.angles):
            sc = classify_singular(A=t.A, B=t.B, C=t.C, a=t.a, b=t.b, c=t.c)
            out['singular'] = {'pattern': sc.pattern.value, 'vertex': sc.singular_vertex}
        _echo_json(out)
        return

    solutions = SOLVERS[mode](*values)
    _echo_json({'mode': mode, 'solutions': [_triangle_json(t, degrees) for t in solutions]})


@cli.group()
def fixtures():
    '''Generate fixture polyhedra.'''


@fixtures.command('list')
def fixtures_list():
    '''Names accepted by `fixtures export`.'''
    from .fixtures import CANONICAL_NAMES

    for name in (*CANONICAL_NAMES, 'prism(n)', 'antiprism(n)', 'random_convex', 'dented', 'twisted_cube'):
        click.echo(name)


def _parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition('=')
    if not sep:
        raise click.BadParameter(f'expected key=value, got {text!r}', param_hint='--param')
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


@fixtures.command('export')
@click.argument('name')
@click.option('--seed', type=int, default=DEFAULT_SEED, show_default=True)
@click.option('--param', 'params', multiple=True, help='Generator parameter, e.g. n=12 or dual=true')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default='.', show_default=True)
@_handle_errors
def fixtures_export(name: str, seed: int, params: tuple[str, ...], out_dir: str):
    '''Write the input bundle and realization JSON of a fixture.'''
    from .fixtures import FixtureRecipe, export_bundle

    recipe = FixtureRecipe(name, seed, dict(_parse_param(p) for p in params))
    bundle_path, real_path = export_bundle(recipe, Path(out_dir))
    click.echo(f'Bundle:      {bundle_path}', err=True)
    click.echo(f'Realization: {real_path}', err=True)
    _echo_json({'bundle': str(bundle_path), 'realization': str(real_path)})


if __name__ == '__main__':
    cli()
