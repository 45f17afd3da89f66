#
# core/__init__.py
# config loading, writer set-up and the four commands called by the driver
#

from typing import (
    Any,
    Dict,
    IO,
    List,
    Optional,
    Tuple,
    TYPE_CHECKING
)

import math
import yaml
import yaml.parser
import yaml.scanner

from dataclasses import dataclass

import core.existing_writers
import core.grid_interface
import core.model_interface
import core.report_interface

import offdiag.classify
import offdiag.exceptions
import offdiag.oracle
import offdiag.riccati
import offdiag.writer

from offdiag.model import SpectralModel
from offdiag.schedule import EpsilonSchedule

if TYPE_CHECKING:
    from core.cli import RunConfig

VERSION = "1.0.0"

default_config_yaml = f"""#
# offdiag v{VERSION}
#
# This is the offdiag configuration file. Command-line flags override the
# values given here.
#

---

core:
  workers: 4

numerics:
  epsilon:
    k0: 10
    k1: 40
  tolerance:
    atomic: 1.0e-8
    refinable: 1.0e-4
    residual: 1.0e-10
    convergence_atomic: 1.0e-10
    convergence_refinable: 1.0e-6
  quadrature:
    nodes: 64
    depth: 4
  cantor:
    depth: 16
  oracle:
    max_atoms: 5000
  g2:
    growth_ratio: 1.5
  refinement:
    blowup_factor: 1.2
    stable_rtol: 1.0e-6
  residual:
    random_vectors: 10

writers:
  enabled:
    - stderr
  stderr:
    mask: 0b1111000
  logfile:
    files:
      - path: logs/debug.log
        mask: 0b1111111
      - path: logs/important.log
        mask: [WARN, ERRR, CRIT, ALRT]
"""

KNOWN_SECTIONS = ('core', 'numerics', 'writers')



def _safe_load_config_path(config_path: Optional[str]) -> Dict[str, Any]:
    """ A missing file means the defaults; it is never created. """
    default = yaml.safe_load(default_config_yaml)
    if config_path is None: return default
    try:
        with open(config_path, 'r') as file:
            conf = yaml.safe_load(file.read())
        if conf is None: return {}
        if not isinstance(conf, dict):
            raise offdiag.exceptions.InvalidConfigValue('', "config file must be a mapping")
        return conf
    except FileNotFoundError:
        offdiag.writer.debug(f"Config file {config_path} not found, using default.")
        return default
    except (yaml.parser.ParserError, yaml.scanner.ScannerError) as e:
        raise offdiag.exceptions.ConfigSyntaxError(config_path, e) from e


def deep_merge(dict1: dict, dict2: dict) -> dict:
    """ Merges two dicts. If keys are conflicting, dict2 is preferred. """
    def _val(v1, v2):
        if isinstance(v1, dict) and isinstance(v2, dict):
            return deep_merge(v1, v2)
        return v1 if v2 is None else v2
    return {k: _val(dict1.get(k), dict2.get(k)) for k in dict1.keys() | dict2.keys()}


def config_value(conf: Dict[str, Any], key_path: str, typ: type) -> Any:
    """ Looks up a dotted key path and checks its type; ints are accepted for floats. """
    value: Any = conf
    for part in key_path.split('.'):
        if not isinstance(value, dict) or part not in value:
            raise offdiag.exceptions.InvalidConfigValue(key_path, "missing")
        value = value[part]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if typ is float and isinstance(value, str):
        # PyYAML reads 1e-8 (no dot) as a string
        try: value = float(value)
        except ValueError: pass
    if isinstance(value, bool) and typ is not bool or not isinstance(value, typ):
        raise offdiag.exceptions.InvalidConfigValue(key_path, f"expected {typ.__name__}, got {value!r}")
    if typ is float and not math.isfinite(value):
        raise offdiag.exceptions.InvalidConfigValue(key_path, f"must be finite, got {value!r}")
    return value


def _positive(conf: Dict[str, Any], key_path: str, typ: type) -> Any:
    value = config_value(conf, key_path, typ)
    if not value > 0:
        raise offdiag.exceptions.InvalidConfigValue(key_path, f"must be positive, got {value!r}")
    return value



@dataclass(frozen=True)
class Settings:
    """ Typed view of the merged configuration. """
    workers: int = 4
    k0: int = 10
    k1: int = 40
    tol_atomic: float = offdiag.classify.TOL_ATOMIC
    tol_refinable: float = offdiag.classify.TOL_REFINABLE
    tol_residual: float = offdiag.riccati.RESIDUAL_TOL
    convergence_atomic: float = offdiag.classify.CONVERGENCE_ATOMIC
    convergence_refinable: float = offdiag.classify.CONVERGENCE_REFINABLE
    quadrature_nodes: int = 64
    quadrature_depth: int = 4
    cantor_depth: int = 16
    max_atoms: int = offdiag.oracle.DEFAULT_MAX_ATOMS
    growth_ratio: float = offdiag.classify.G2_GROWTH_RATIO
    blowup_factor: float = offdiag.riccati.BLOWUP_FACTOR
    stable_rtol: float = offdiag.riccati.STABLE_RTOL
    random_vectors: int = offdiag.riccati.RANDOM_VECTORS

    @classmethod
    def from_config(cls, conf: Dict[str, Any]) -> 'Settings':
        for section in conf:
            if section not in KNOWN_SECTIONS:
                offdiag.writer.warn(f"Unknown config section '{section}', ignoring")
        settings = cls(
            workers=_positive(conf, 'core.workers', int),
            k0=config_value(conf, 'numerics.epsilon.k0', int),
            k1=config_value(conf, 'numerics.epsilon.k1', int),
            tol_atomic=_positive(conf, 'numerics.tolerance.atomic', float),
            tol_refinable=_positive(conf, 'numerics.tolerance.refinable', float),
            tol_residual=_positive(conf, 'numerics.tolerance.residual', float),
            convergence_atomic=_positive(conf, 'numerics.tolerance.convergence_atomic', float),
            convergence_refinable=_positive(conf, 'numerics.tolerance.convergence_refinable', float),
            quadrature_nodes=_positive(conf, 'numerics.quadrature.nodes', int),
            quadrature_depth=config_value(conf, 'numerics.quadrature.depth', int),
            cantor_depth=config_value(conf, 'numerics.cantor.depth', int),
            max_atoms=_positive(conf, 'numerics.oracle.max_atoms', int),
            growth_ratio=_positive(conf, 'numerics.g2.growth_ratio', float),
            blowup_factor=_positive(conf, 'numerics.refinement.blowup_factor', float),
            stable_rtol=_positive(conf, 'numerics.refinement.stable_rtol', float),
            random_vectors=config_value(conf, 'numerics.residual.random_vectors', int),
        )
        if settings.k1 <= settings.k0:
            raise offdiag.exceptions.InvalidConfigValue('numerics.epsilon', f"need k0 < k1, got {settings.k0}:{settings.k1}")
        if settings.random_vectors < 0:
            raise offdiag.exceptions.InvalidConfigValue('numerics.residual.random_vectors', "must be >= 0")
        return settings

    @property
    def model_defaults(self) -> core.model_interface.ModelDefaults:
        return core.model_interface.ModelDefaults(self.quadrature_nodes, self.quadrature_depth, self.cantor_depth)



class Core:
    def __init__(self, config_path: Optional[str] = None, config: Optional[Dict[str, Any]] = None):
        # writers come first so config problems can be reported
        default = yaml.safe_load(default_config_yaml)
        loaded = config if config is not None else _safe_load_config_path(config_path)
        self.__config = deep_merge(default, loaded)
        self.__writers: List[str] = []
        self.__core_running = True
        try:
            self._enable_writers(self.__config.get('writers') or {})
            self.settings = Settings.from_config(self.__config)
        except Exception:
            self.stop()
            raise
        offdiag.writer.debug(f"Initialized offdiag core v{VERSION}, writers: {', '.join(self.__writers) or 'none'}")


    def _enable_writers(self, writer_configs: Dict[str, Any]) -> None:
        core.existing_writers.add_known_writers()
        enabled = writer_configs.get('enabled') or []
        if not isinstance(enabled, list):
            raise offdiag.exceptions.InvalidConfigValue('writers.enabled', f"expected a list, got {enabled!r}")
        for writer in enabled:
            this_writer_config = writer_configs.get(writer) or {}
            try:
                offdiag.writer.enable(writer, this_writer_config)
                self.__writers.append(writer)
            except offdiag.exceptions.WriterNotFound:
                offdiag.writer.warn(f"Unknown writer type '{writer}' in config writers.enabled")
            except offdiag.exceptions.WriterAlreadyEnabled:
                offdiag.writer.debug(f"Writer '{writer}' was already enabled")
            except offdiag.exceptions.ConfigError:
                raise
            except Exception as e:
                offdiag.writer.error(f"Error enabling writer '{writer}':", repr(e))


    def stop(self):
        if not self.__core_running:
            raise offdiag.exceptions.OffdiagError("Core already stopped")
        for writer in self.__writers:
            try: offdiag.writer.disable(writer)
            except offdiag.exceptions.WriterAlreadyDisabled: pass
        self.__writers = []
        self.__core_running = False


    @property
    def running(self) -> bool: return self.__core_running

    @property
    def config(self) -> Dict[str, Any]: return self.__config


    ## shared helpers

    def load_model(self, path: str) -> core.model_interface.ModelFile:
        return core.model_interface.load_model_file(path, self.settings.model_defaults)

    def schedule(self, model: SpectralModel, cfg: 'RunConfig') -> EpsilonSchedule:
        k0, k1 = (cfg.eps.k0, cfg.eps.k1) if cfg.eps is not None else (self.settings.k0, self.settings.k1)
        return EpsilonSchedule(k0, k1, model.nu.scale())

    def classification_tol(self, model: SpectralModel, cfg: 'RunConfig') -> float:
        if cfg.tol is not None: return cfg.tol
        return self.settings.tol_refinable if model.nu.refinable else self.settings.tol_atomic

    def convergence_rtol(self, model: SpectralModel) -> float:
        return self.settings.convergence_refinable if model.nu.refinable else self.settings.convergence_atomic

    def workers(self, cfg: 'RunConfig') -> int:
        return cfg.workers if cfg.workers is not None else self.settings.workers

    def grid(self, cfg: 'RunConfig') -> List[float]:
        values = list(cfg.lambdas)
        if cfg.grid is not None: values.extend(cfg.grid.values().tolist())
        return values


    ## commands; each returns an exit code

    def run(self, cfg: 'RunConfig', out: IO[str]) -> int:
        commands = {
            'classify': self.cmd_classify,
            'eigs': self.cmd_eigs,
            'verify': self.cmd_verify,
            'scan': self.cmd_scan,
        }
        model_file = self.load_model(cfg.model)
        offdiag.writer.info(f"Running {cfg.command} on {cfg.model}")
        return commands[cfg.command](model_file, cfg, out)


    def _classify_one(self, model: SpectralModel, lam: float, cfg: 'RunConfig') -> Dict[str, Any]:
        schedule = self.schedule(model, cfg)
        rtol = self.convergence_rtol(model)
        try:
            pc = offdiag.classify.classify_point(model, lam, self.classification_tol(model, cfg), schedule,
                                                 self.settings.growth_ratio, rtol)
        except offdiag.exceptions.AtomAtLambda as e:
            bv = offdiag.classify.boundary_value(model.nu, lam, schedule, rtol)
            return core.report_interface.atom_record(e, bv.divergence_exponent)
        return core.report_interface.classify_record(pc)


    def cmd_classify(self, model_file: core.model_interface.ModelFile, cfg: 'RunConfig', out: IO[str]) -> int:
        model = model_file.model
        records = core.grid_interface.evaluate_grid(lambda lam: self._classify_one(model, lam, cfg),
                                                    self.grid(cfg), self.workers(cfg))
        core.report_interface.write_records(records, core.report_interface.CLASSIFY_COLUMNS, cfg.format, out)
        offdiag.writer.debug("classify:", core.report_interface.summary(records, 'class'))
        return 0


    def cmd_scan(self, model_file: core.model_interface.ModelFile, cfg: 'RunConfig', out: IO[str]) -> int:
        model = model_file.model
        schedule = self.schedule(model, cfg)

        def one(lam: float) -> Dict[str, Any]:
            try:
                scaling = offdiag.classify.sc_probe(model, lam, schedule)
            except offdiag.exceptions.OffdiagError as e:
                offdiag.writer.debug(f"scan: no scaling exponent at {lam!r}: {e}")
                scaling = None
            return core.report_interface.scan_record(self._classify_one(model, lam, cfg), scaling)

        records = core.grid_interface.evaluate_grid(one, self.grid(cfg), self.workers(cfg))
        core.report_interface.write_records(records, core.report_interface.SCAN_COLUMNS, cfg.format, out)
        offdiag.writer.debug("scan:", core.report_interface.summary(records, 'class'))
        return 0


    def _oracle_match(self, model: SpectralModel, found, interval: Tuple[float, float]) -> Tuple[List[Optional[float]], bool]:
        """ Nearest oracle eigenvalue per found eigenvalue; False when the counts disagree. """
        unmatched = [None] * len(found)
        try:
            spectrum = offdiag.oracle.oracle_spectrum(model, self.settings.max_atoms)
        except offdiag.exceptions.OracleTooLarge as e:
            offdiag.writer.info(f"eigs: skipping oracle comparison: {e}")
            return unmatched, True
        l, r = interval
        slack = 1e-9 * model.scale()
        spectrum = spectrum[(spectrum >= l - slack) & (spectrum <= r + slack)]
        # refinable models skip the gaps below their resolution, so only atomic counts must agree
        if not model.nu.refinable and spectrum.size != len(found):
            offdiag.writer.error(f"eigs: {len(found)} eigenvalues found, oracle has {spectrum.size}")
            return unmatched, False
        if spectrum.size == 0: return unmatched, True
        return [float(spectrum[abs(spectrum - lam).argmin()]) for lam in found], True


    def cmd_eigs(self, model_file: core.model_interface.ModelFile, cfg: 'RunConfig', out: IO[str]) -> int:
        model = model_file.model
        interval = cfg.interval if cfg.interval is not None else offdiag.classify.spectral_interval(model)
        found = offdiag.classify.find_eigenvalues(model, interval)
        matched, consistent = self._oracle_match(model, found, interval)
        code = 0 if consistent else 1
        records = [core.report_interface.eigs_record(lam, o) for lam, o in zip(found, matched)]
        worst = max((r['delta'] for r in records if r['delta'] is not None), default=0.0)
        if worst > 1e-9 * model.scale():
            offdiag.writer.error(f"eigs: max |delta| {worst:.3e} against the oracle")
            code = 1
        core.report_interface.write_records(records, core.report_interface.EIGS_COLUMNS, cfg.format, out)
        return code


    def _kmm(self, model: SpectralModel, gap) -> Tuple[Dict[str, Any], bool]:
        d = offdiag.riccati.spectral_gap(model) if gap == 'auto' else float(gap)
        try:
            check = offdiag.riccati.kmm_check(model, d)
        except offdiag.exceptions.NotApplicable as e:
            return core.report_interface.kmm_record(None, d, str(e)), True
        return core.report_interface.kmm_record(check, d), check.passed


    def cmd_verify(self, model_file: core.model_interface.ModelFile, cfg: 'RunConfig', out: IO[str]) -> int:
        model = model_file.model
        if cfg.depths is not None and model.refinable:
            model = model.at_depth(cfg.depths.final)
        tol = cfg.tol if cfg.tol is not None else self.settings.tol_residual
        if cfg.lambdas:
            lambdas = list(cfg.lambdas)
            eigenvalues = None
        else:
            interval = cfg.interval if cfg.interval is not None else offdiag.classify.spectral_interval(model)
            lambdas = offdiag.classify.find_eigenvalues(model, interval).tolist()
            eigenvalues = lambdas if cfg.interval is None else None
        schedule = self.schedule(model, cfg)
        class_tol = self.classification_tol(model, cfg)
        rtol = self.convergence_rtol(model)

        records, ok = [], True
        for lam in lambdas:
            try:
                pc = offdiag.classify.classify_point(model, lam, class_tol, schedule,
                                                     self.settings.growth_ratio, rtol)
                cert = offdiag.riccati.certify(
                    model, lam, tol, cfg.fault, self.settings.random_vectors, cfg.seed,
                    eigenvalues, cfg.depths.values() if cfg.depths is not None else None,
                    pc, self.settings.blowup_factor, self.settings.stable_rtol)
            except offdiag.exceptions.AtomAtLambda as e:
                records.append(core.report_interface.failed_certificate_record(lam, 'AtomAtLambda', str(e)))
                ok = False
                continue
            record = core.report_interface.certificate_record(cert)
            if cert.warning: offdiag.writer.warn(f"verify at {lam!r}: {cert.warning}")
            records.append(record)
            ok &= cert.passed

        certificate: Dict[str, Any] = {
            'model': model_file.path,
            'version': VERSION,
            'seed': cfg.seed,
            'fault': cfg.fault,
            'eigenvalues': records,
        }
        if model_file.gap is not None:
            certificate['kmm'], kmm_ok = self._kmm(model, model_file.gap)
            ok &= kmm_ok
        certificate['verdict'] = 'pass' if ok else 'fail'
        core.report_interface.write_certificate(certificate, cfg.format, out)
        if not ok: offdiag.writer.error("verify: certificate failed")
        return 0 if ok else 1
