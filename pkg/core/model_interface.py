#
# core/model_interface.py
#
# model files: YAML (or JSON) documents describing (m, v, a1). every error
# names the offending field path, e.g. "measure.components[1].measure.ratio".
#

import math
import yaml
import yaml.parser
import yaml.scanner

from dataclasses import dataclass
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Union
)

import offdiag.exceptions
import offdiag.measure
import offdiag.writer

from offdiag.measure import Measure
from offdiag.model import SpectralModel, Coupling


recognized_top_keys = ['a1', 'measure', 'v', 'gap', 'name', 'description']

measure_keys = {
    'atomic':  ['type', 'points', 'weights'],
    'density': ['type', 'interval', 'density', 'coefficients', 'depth', 'nodes'],
    'cantor':  ['type', 'interval', 'ratio', 'p', 'depth'],
    'mixture': ['type', 'components'],
}


@dataclass(frozen=True)
class ModelDefaults:
    quadrature_nodes: int = offdiag.measure.DEFAULT_QUADRATURE_NODES
    quadrature_depth: int = offdiag.measure.DEFAULT_QUADRATURE_DEPTH
    cantor_depth: int = offdiag.measure.DEFAULT_CANTOR_DEPTH


@dataclass(frozen=True, eq=False)
class ModelFile:
    path: str
    model: SpectralModel
    gap: Union[None, str, float] = None
    name: Optional[str] = None



# field readers

def _fail(path: str, message: str):
    raise offdiag.exceptions.ModelFileError(path, message)


def _require(conf: Dict[str, Any], key: str, path: str) -> Any:
    if key not in conf or conf[key] is None:
        _fail(f"{path}.{key}" if path else key, "required field is missing")
    return conf[key]


def _real(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a real number, got {value!r}")
    if not math.isfinite(value):
        _fail(path, f"must be finite, got {value!r}")
    return float(value)


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _complex(value: Any, path: str) -> complex:
    """ A real number, a [re, im] pair, or a string such as "1+2j". """
    if isinstance(value, str):
        try: out = complex(value.replace(' ', ''))
        except ValueError: _fail(path, f"cannot parse complex number {value!r}")
    elif isinstance(value, list):
        if len(value) != 2: _fail(path, "complex pairs must be [re, im]")
        out = complex(_real(value[0], f"{path}[0]"), _real(value[1], f"{path}[1]"))
    else:
        out = complex(_real(value, path))
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        _fail(path, f"must be finite, got {value!r}")
    return out


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list) or len(value) == 0:
        _fail(path, "expected a non-empty list")
    return value


def _interval(conf: Dict[str, Any], path: str):
    pair = _list(_require(conf, 'interval', path), f"{path}.interval")
    if len(pair) != 2: _fail(f"{path}.interval", "expected [lo, hi]")
    lo, hi = _real(pair[0], f"{path}.interval[0]"), _real(pair[1], f"{path}.interval[1]")
    if not lo < hi: _fail(f"{path}.interval", f"need lo < hi, got [{lo}, {hi}]")
    return lo, hi


def _warn_unknown(conf: Dict[str, Any], known: List[str], path: str):
    for key in conf:
        if key not in known:
            offdiag.writer.warn(f"model file: ignoring unknown field {path + '.' if path else ''}{key}")



# measure and coupling

def parse_measure(conf: Any, path: str = 'measure', defaults: ModelDefaults = ModelDefaults()) -> Measure:
    if not isinstance(conf, dict):
        _fail(path, "expected a mapping")
    typ = _require(conf, 'type', path)
    if typ not in measure_keys:
        _fail(f"{path}.type", f"unknown measure type {typ!r} (must be one of {', '.join(measure_keys)})")
    _warn_unknown(conf, measure_keys[typ], path)
    try:
        if typ == 'atomic':
            points = [_real(x, f"{path}.points[{i}]") for i, x in enumerate(_list(_require(conf, 'points', path), f"{path}.points"))]
            weights = [_real(x, f"{path}.weights[{i}]") for i, x in enumerate(_list(_require(conf, 'weights', path), f"{path}.weights"))]
            if len(points) != len(weights):
                _fail(f"{path}.weights", f"has {len(weights)} entries, points has {len(points)}")
            for i, w in enumerate(weights):
                if not w > 0: _fail(f"{path}.weights[{i}]", f"must be positive, got {w}")
            return offdiag.measure.atomic(points, weights)

        if typ == 'density':
            lo, hi = _interval(conf, path)
            name = conf.get('density', 'uniform')
            coefficients = tuple(_real(x, f"{path}.coefficients[{i}]") for i, x in enumerate(conf.get('coefficients') or []))
            try: density = offdiag.measure.Density(name, coefficients)
            except offdiag.exceptions.InvalidMeasure as e: _fail(f"{path}.density", str(e))
            depth = _int(conf.get('depth', defaults.quadrature_depth), f"{path}.depth")
            nodes = _int(conf.get('nodes', defaults.quadrature_nodes), f"{path}.nodes")
            return offdiag.measure.QuadratureDensity(lo, hi, density, depth, nodes)

        if typ == 'cantor':
            lo, hi = _interval(conf, path)
            ratio = _real(conf.get('ratio', 1 / 3), f"{path}.ratio")
            p = _real(conf.get('p', 0.5), f"{path}.p")
            depth = _int(conf.get('depth', defaults.cantor_depth), f"{path}.depth")
            return offdiag.measure.CantorApprox(lo, hi, ratio, p, depth)

        components = []
        for i, entry in enumerate(_list(_require(conf, 'components', path), f"{path}.components")):
            sub = f"{path}.components[{i}]"
            if not isinstance(entry, dict): _fail(sub, "expected a mapping with coefficient and measure")
            _warn_unknown(entry, ['coefficient', 'measure'], sub)
            c = _real(_require(entry, 'coefficient', sub), f"{sub}.coefficient")
            if not c > 0: _fail(f"{sub}.coefficient", f"must be positive, got {c}")
            components.append((c, parse_measure(_require(entry, 'measure', sub), f"{sub}.measure", defaults)))
        return offdiag.measure.Mixture(tuple(components))

    except offdiag.exceptions.ModelFileError:
        raise
    except offdiag.exceptions.ModelError as e:
        raise offdiag.exceptions.ModelFileError(path, str(e)) from e


def parse_coupling(conf: Any, path: str = 'v') -> Coupling:
    if not isinstance(conf, dict):
        # shorthand: v: 1.0
        return Coupling(value=_complex(conf, path))
    typ = conf.get('type', 'constant')
    if typ == 'constant':
        _warn_unknown(conf, ['type', 'value'], path)
        return Coupling(value=_complex(_require(conf, 'value', path), f"{path}.value"))
    if typ == 'samples':
        _warn_unknown(conf, ['type', 'values'], path)
        values = _list(_require(conf, 'values', path), f"{path}.values")
        return Coupling(samples=[_complex(x, f"{path}.values[{i}]") for i, x in enumerate(values)])
    _fail(f"{path}.type", f"expected 'constant' or 'samples', got {typ!r}")


def parse_model(conf: Any, defaults: ModelDefaults = ModelDefaults()) -> SpectralModel:
    if not isinstance(conf, dict):
        _fail('', "model file must be a mapping with fields a1, measure, v")
    _warn_unknown(conf, recognized_top_keys, '')
    a1 = _real(_require(conf, 'a1', ''), 'a1')
    measure = parse_measure(_require(conf, 'measure', ''), 'measure', defaults)
    coupling = parse_coupling(_require(conf, 'v', ''), 'v')
    if not coupling.constant:
        # atomic files are matched against the points as written, before duplicates merge
        if isinstance(measure, offdiag.measure.AtomicMeasure):
            count, where = len(conf['measure']['points']), "measure.points has"
        else:
            count, where = measure.atoms()[0].size, f"the {measure.kind} measure has"
        if coupling.samples.size != count:
            _fail('v.values', f"has {coupling.samples.size} entries, {where} {count}")
    try:
        if not coupling.constant and isinstance(measure, offdiag.measure.AtomicMeasure):
            raw = conf['measure']
            return SpectralModel.from_atoms(raw['points'], raw['weights'], coupling.samples, a1)
        return SpectralModel(measure, coupling, a1)
    except offdiag.exceptions.ModelFileError:
        raise
    except offdiag.exceptions.ModelError as e:
        raise offdiag.exceptions.ModelFileError('v', str(e)) from e


def parse_gap(value: Any) -> Union[None, str, float]:
    if value is None: return None
    if value == 'auto': return 'auto'
    gap = _real(value, 'gap')
    if not gap > 0: _fail('gap', f"must be positive or 'auto', got {gap}")
    return gap


def load_model_file(path: str, defaults: ModelDefaults = ModelDefaults()) -> ModelFile:
    """ Reads a model file. YAML is a superset of JSON, so both are accepted. """
    try:
        with open(path, 'r') as file:
            conf = yaml.safe_load(file.read())
    except FileNotFoundError:
        raise offdiag.exceptions.ModelFileError('', f"model file {path} not found")
    except (yaml.parser.ParserError, yaml.scanner.ScannerError) as e:
        raise offdiag.exceptions.ModelFileError('', f"model file {path} is not valid YAML/JSON: {e}")
    model = parse_model(conf, defaults)
    offdiag.writer.debug(f"loaded model {path}: {model.m.kind} measure with {model.points.size} atoms, "
                         f"a1 = {model.a1}, ||v|| = {model.v_norm:.6g}")
    return ModelFile(path, model, parse_gap(conf.get('gap')), conf.get('name'))
