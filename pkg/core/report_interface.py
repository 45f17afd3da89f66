#
# core/report_interface.py
#
# machine-readable output: JSON lines or CSV with a fixed column order per
# command, and the verify certificate. non-finite numbers are written as null.
#

import csv
import io
import json
import math

from typing import (
    Any,
    Dict,
    IO,
    List,
    Optional,
    Sequence
)

import numpy as np

import offdiag.exceptions

from offdiag.classify import Divergent, PointClass, ScalingReport
from offdiag.riccati import GraphCertificate, KMMCheck, Unbounded


CLASSIFY_COLUMNS = ('lambda', 'class', 're_F', 'im_F', 'g2', 'residual', 'exponent')
SCAN_COLUMNS = CLASSIFY_COLUMNS
EIGS_COLUMNS = ('lambda', 'oracle', 'delta')
VERIFY_COLUMNS = ('lambda', 'class', 'norm_or_unbounded', 'max_residual',
                  'invariance_defect', 'eigvec_check', 'verdict', 'warning')

FORMATS = ('json', 'csv')



def number(x: Any) -> Optional[float]:
    """ Plain float, or None for missing and non-finite values. """
    if x is None: return None
    x = float(x)
    return x if math.isfinite(x) else None


def jsonable(obj: Any) -> Any:
    if isinstance(obj, dict): return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)): return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray): return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)): return bool(obj)
    if isinstance(obj, (int, np.integer)): return int(obj)
    if isinstance(obj, (float, np.floating)): return number(obj)
    return obj



## records

def classify_record(pc: PointClass) -> Dict[str, Any]:
    ev = pc.evidence
    g2 = 'divergent' if isinstance(ev.g2, Divergent) else number(ev.g2)
    return {
        'lambda': pc.lam,
        'class': str(pc.tag),
        're_F': number(ev.re_F),
        'im_F': number(ev.im_F),
        'g2': g2,
        'residual': number(ev.residual),
        'exponent': number(ev.boundary.divergence_exponent),
    }


def atom_record(e: offdiag.exceptions.AtomAtLambda, exponent: Optional[float] = None) -> Dict[str, Any]:
    return {
        'lambda': e.lam,
        'class': 'AtomAtLambda',
        're_F': None,
        'im_F': None,
        'g2': 'divergent',
        'residual': None,
        'exponent': number(exponent),
    }


def scan_record(base: Dict[str, Any], scaling: Optional[ScalingReport]) -> Dict[str, Any]:
    """ A classify record whose exponent is the eps-scaling slope; None when the fit failed. """
    out = dict(base)
    out['exponent'] = None if scaling is None else number(scaling.exponent)
    return out


def eigs_record(lam: float, oracle: Optional[float]) -> Dict[str, Any]:
    return {
        'lambda': float(lam),
        'oracle': number(oracle),
        'delta': None if oracle is None else abs(float(lam) - float(oracle)),
    }


def _norm(norm) -> Any:
    if isinstance(norm, Unbounded): return 'unbounded'
    return number(norm)


def certificate_record(cert: GraphCertificate) -> Dict[str, Any]:
    eigvec = None
    if cert.eigvec is not None:
        eigvec = {
            'passed': cert.eigvec.passed,
            'residual': number(cert.eigvec.residual),
            'orthogonality': number(cert.eigvec.orthogonality),
            'vector_last': number(cert.eigvec.vector[-1].real),
        }
    out = {
        'lambda': cert.lam,
        'class': str(cert.tag),
        'norm_or_unbounded': _norm(cert.norm),
        'max_residual': number(cert.residual.max_residual),
        'invariance_defect': number(cert.defect.max_defect),
        'eigvec_check': eigvec,
        'isolation_radius': number(cert.isolation),
        'verdict': cert.verdict,
        'warning': cert.warning,
    }
    if cert.blowup is not None:
        out['refinement'] = {
            'depths': list(cert.blowup.depths),
            'norms': [number(x) for x in cert.blowup.norms],
            'verdict': cert.blowup.verdict,
        }
    return out


def failed_certificate_record(lam: float, tag: str, reason: str) -> Dict[str, Any]:
    return {
        'lambda': float(lam),
        'class': tag,
        'norm_or_unbounded': 'unbounded' if tag == 'AtomAtLambda' else None,
        'max_residual': None,
        'invariance_defect': None,
        'eigvec_check': None,
        'isolation_radius': None,
        'verdict': 'not-a-candidate',
        'warning': reason,
    }


def kmm_record(check: Optional[KMMCheck], d: float, reason: Optional[str] = None) -> Dict[str, Any]:
    if check is None:
        return {'applicable': False, 'd': number(d), 'reason': reason}
    return {
        'applicable': True,
        'd': number(check.d),
        'v_norm': number(check.v_norm),
        'c_pi': number(check.bound.c_pi),
        'delta_V': number(check.bound.delta_V),
        'bound': number(check.bound.bound),
        'min_ratio': number(check.min_ratio),
        'passed': check.passed,
    }



## emission

def _csv_cell(value: Any) -> str:
    if value is None: return ''
    if isinstance(value, bool): return 'true' if value else 'false'
    if isinstance(value, float): return repr(value)
    if isinstance(value, dict): return 'pass' if value.get('passed') else 'fail'
    return str(value)


def write_records(records: Sequence[Dict[str, Any]], columns: Sequence[str], fmt: str, out: IO[str]) -> None:
    if fmt not in FORMATS:
        raise offdiag.exceptions.InvalidConfigValue("format", f"expected one of {', '.join(FORMATS)}, got '{fmt}'")
    if fmt == 'json':
        for record in records:
            out.write(json.dumps({c: jsonable(record.get(c)) for c in columns}) + '\n')
        return
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for record in records:
        writer.writerow([_csv_cell(jsonable(record.get(c))) for c in columns])
    out.write(buffer.getvalue())


def write_certificate(certificate: Dict[str, Any], fmt: str, out: IO[str]) -> None:
    """ JSON: the whole document on one line. CSV: one row per eigenvalue. """
    if fmt == 'csv':
        write_records(certificate['eigenvalues'], VERIFY_COLUMNS, fmt, out)
        return
    out.write(json.dumps(jsonable(certificate)) + '\n')


def summary(records: List[Dict[str, Any]], key: str) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for record in records:
        counts[str(record.get(key))] = counts.get(str(record.get(key)), 0) + 1
    return dict(sorted(counts.items()))
