"""Built-in method registry and JSON import/export.

Coefficients are stored as decimal strings exactly as published (15-17
significant digits where available) and parsed once at import; exact rationals
are stored as fraction strings.  Transcription fidelity is itself under test:
for every record that carries a convex-combination form, the form must
reconstruct the stored tableau.

Registry ids: ssp33, ssp43, ssp53_r, ssp53_h, ssp53_1, ssp53_2,
ssp53_2nstar_1, ssp53_2nstar_2, ssp53_w1, ssp53_w2, ssp53_vdh.  The first and
second order families are available through :func:`ssp_first_order` /
:func:`ssp_second_order` and the dynamic ids ``ssp1_<s>`` / ``ssp2_<s>``
(``fe`` is an alias for ``ssp1_1``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import DimensionMismatch, UnknownMethod
from .family53 import ssp53_optimal_radius
from .tableau import ButcherTableau, ShuOsherForm


def _num(text: str) -> float:
    return float(Fraction(text))


def _tableau(rows: list[list[str]], weights: list[str]) -> ButcherTableau:
    s = len(weights)
    A = np.zeros((s, s))
    for i, row in enumerate(rows, start=1):
        A[i, : len(row)] = [_num(x) for x in row]
    return ButcherTableau(A=A, b=np.array([_num(x) for x in weights]))


def _form(lam_rows: list[list[str]], gam_rows: list[list[str]]) -> ShuOsherForm:
    n = len(lam_rows) + 1
    lam = np.zeros((n, n))
    gam = np.zeros((n, n))
    for i, row in enumerate(lam_rows, start=1):
        lam[i, : len(row)] = [_num(x) for x in row]
    for i, row in enumerate(gam_rows, start=1):
        gam[i, : len(row)] = [_num(x) for x in row]
    return ShuOsherForm(lam=lam, gam=gam)


@dataclass(frozen=True)
class MethodRecord:
    """Catalog entry: tableau, optional convex form, and reference data."""

    id: str
    name: str
    s: int
    p: int
    tableau: ButcherTableau
    shu_osher: ShuOsherForm | None
    ref_ssp: float | None
    ref_error_const: float | None
    ref_storage: str | None  # "2N*", "3N-A", "3N-B", "general", "naive"


_R53 = ssp53_optimal_radius(1e-14)


def _build_registry() -> dict[str, MethodRecord]:
    reg: dict[str, MethodRecord] = {}

    def add(rec: MethodRecord) -> None:
        reg[rec.id] = rec

    add(MethodRecord(
        id="ssp33", name="SSP(3,3)", s=3, p=3,
        tableau=_tableau([["1"], ["1/4", "1/4"]], ["1/6", "1/6", "2/3"]),
        shu_osher=_form(
            [["1"], ["3/4", "1/4"], ["1/3", "0", "2/3"]],
            [["1"], ["0", "1/4"], ["0", "0", "2/3"]],
        ),
        ref_ssp=1.0, ref_error_const=None, ref_storage="2N*",
    ))

    add(MethodRecord(
        id="ssp43", name="SSP(4,3)", s=4, p=3,
        tableau=_tableau(
            [["1/2"], ["1/2", "1/2"], ["1/6", "1/6", "1/6"]],
            ["1/6", "1/6", "1/6", "1/2"],
        ),
        shu_osher=_form(
            [["1"], ["0", "1"], ["2/3", "0", "1/3"], ["0", "0", "0", "1"]],
            [["1/2"], ["0", "1/2"], ["0", "0", "1/6"], ["0", "0", "0", "1/2"]],
        ),
        ref_ssp=2.0, ref_error_const=3.60844e-02, ref_storage="2N*",
    ))

    add(MethodRecord(
        id="ssp53_r", name="SSP53_R", s=5, p=3,
        tableau=_tableau(
            [
                ["0.377268915331368"],
                ["0.377268915331368", "0.377268915331368"],
                ["0.242995220537395", "0.242995220537395", "0.242995220537395"],
                ["0.153589067695126", "0.153589067695126", "0.153589067695126",
                 "0.23845893284629"],
            ],
            ["0.206734020864804", "0.206734020864804", "0.117097251841844",
             "0.18180256012014", "0.287632146308408"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0.355909775063327", "0", "0.644090224936674"],
                ["0.367933791638137", "0", "0", "0.632066208361863"],
                ["0", "0", "0.237593836598569", "0", "0.762406163401431"],
            ],
            [
                ["0.377268915331368"],
                ["0", "0.377268915331368"],
                ["0", "0", "0.242995220537396"],
                ["0", "0", "0", "0.238458932846290"],
                ["0", "0", "0", "0", "0.287632146308408"],
            ],
        ),
        ref_ssp=_R53, ref_error_const=1.66219e-02, ref_storage="3N-A",
    ))

    add(MethodRecord(
        id="ssp53_h", name="SSP53_H", s=5, p=3,
        tableau=_tableau(
            [
                ["0.377268915331368"],
                ["0.377268915331368", "0.377268915331368"],
                ["0.260811979144498", "0.260811979144498", "0.260811979144498"],
                ["0.219153436331987", "0.117097251841844", "0.117097251841844",
                 "0.169383144652957"],
            ],
            ["0.219153436331987", "0.117097251841844", "0.117097251841844",
             "0.169383144652957", "0.377268915331368"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0.308684154602513", "0", "0.691315845397487"],
                ["0.280514990468574", "0.270513101776498", "0",
                 "0.448971907754928"],
                ["0", "0", "0", "0", "1"],
            ],
            [
                ["0.377268915331368"],
                ["0", "0.377268915331368"],
                ["0", "0", "0.260811979144498"],
                ["0", "0", "0", "0.169383144652957"],
                ["0", "0", "0", "0", "0.377268915331368"],
            ],
        ),
        ref_ssp=_R53, ref_error_const=1.98589e-02, ref_storage="3N-B",
    ))

    add(MethodRecord(
        id="ssp53_1", name="SSP53_1", s=5, p=3,
        tableau=_tableau(
            [
                ["0.377268915331368"],
                ["0.377268915331368", "0.377268915331368"],
                ["0.162760486162526", "0.162760486162526", "0.162760486162526"],
                ["0.148318743330765", "0.148299726283723", "0.148299726283723",
                 "0.343749752769421"],
            ],
            ["0.196490186861586", "0.117097251841844", "0.117097251841844",
             "0.271424313309946", "0.297890996144780"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0.568582304164742", "0", "0.431417695835258"],
                ["0.088796463619276", "0.000050407140024", "0",
                 "0.911153129240700"],
                ["0", "0.210401429751688", "0", "0", "0.789598570248313"],
            ],
            [
                ["0.377268915331368"],
                ["0", "0.377268915331368"],
                ["0", "0", "0.162760486162526"],
                ["0", "0", "0", "0.343749752769421"],
                ["0", "0", "0", "0", "0.297890996144780"],
            ],
        ),
        ref_ssp=_R53, ref_error_const=1.48757e-02, ref_storage="3N-B",
    ))

    add(MethodRecord(
        id="ssp53_2", name="SSP53_2", s=5, p=3,
        tableau=_tableau(
            [
                ["0.377268915331368"],
                ["0.377268915331368", "0.377268915331368"],
                ["0.252132900663713", "0.252132900663713", "0.252132900663713"],
                ["0.188434549340417", "0.134873511860921", "0.134873511860921",
                 "0.201812549622665"],
            ],
            ["0.213322822390311", "0.166821102311173", "0.117097251841844",
             "0.175213758594633", "0.327545064862039"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0.331689173378475", "0", "0.668310826621525"],
                ["0.323099315304423", "0.141970449466930", "0",
                 "0.534930235228647"],
                ["0", "0", "0.131799489564770", "0", "0.868200510435230"],
            ],
            [
                ["0.377268915331368"],
                ["0", "0.377268915331368"],
                ["0", "0", "0.252132900663713"],
                ["0", "0", "0", "0.201812549622665"],
                ["0", "0", "0", "0", "0.327545064862039"],
            ],
        ),
        ref_ssp=_R53, ref_error_const=1.81787e-02, ref_storage="general",
    ))

    add(MethodRecord(
        id="ssp53_2nstar_1", name="SSP53_2N*_1", s=5, p=3,
        tableau=_tableau(
            [
                ["0.443568244942995"],
                ["0.443568244942995", "0.291111420073766"],
                ["0.443568244942995", "0.291111420073766", "0.27061260127822"],
                ["0.190111792195291", "0.124769332407581", "0.11598361065329",
                 "0.110577759392786"],
            ],
            ["0.190111792195291", "0.124769332407581", "0.11598361065329",
             "0.110577759392786", "0.4585575053510519"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0", "0", "1"],
                ["0.571403511494104", "0", "0", "0.428596488505896"],
                ["0", "0", "0", "0", "1"],
            ],
            [
                ["0.443568244942995"],
                ["0", "0.291111420073766"],
                ["0", "0", "0.270612601278217"],
                ["0", "0", "0", "0.110577759392786"],
                ["0", "0", "0", "0", "0.458557505351052"],
            ],
        ),
        ref_ssp=2.180749177932739, ref_error_const=2.78407e-02,
        ref_storage="2N*",
    ))

    add(MethodRecord(
        id="ssp53_2nstar_2", name="SSP53_2N*_2", s=5, p=3,
        tableau=_tableau(
            [
                ["0.465388589249323"],
                ["0.465388589249323", "0.465388589249323"],
                ["0.147834007766856", "0.147834007766856", "0.124745797313998"],
                ["0.147834007766856", "0.147834007766856", "0.124745797313998",
                 "0.465388589249323"],
            ],
            ["0.141147331533922", "0.141147331533922", "0.119103423338902",
             "0.444338609844587", "0.154263303748666"],
        ),
        shu_osher=_form(
            [
                ["1"],
                ["0", "1"],
                ["0.682342861037239", "0", "0.317657138962761"],
                ["0", "0", "0", "1"],
                ["0.045230974482400", "0", "0", "0", "0.954769025517600"],
            ],
            [
                ["0.465388589249323"],
                ["0", "0.465388589249323"],
                ["0", "0", "0.124745797313998"],
                ["0", "0", "0", "0.465388589249323"],
                ["0", "0", "0", "0", "0.154263303748666"],
            ],
        ),
        ref_ssp=2.1487419827223833, ref_error_const=2.27362e-02,
        ref_storage="2N*",
    ))

    add(MethodRecord(
        id="ssp53_w1", name="SSP53_W1", s=5, p=3,
        tableau=_tableau(
            [
                ["0.67892607116139"],
                ["0.14022991560621", "0.20654657933371"],
                ["0.20569370073026", "0.18144649137471", "0.27959340290485"],
                ["0.16104646283838", "0.19856511041100", "0.08890670263481",
                 "0.31738259840613"],
            ],
            ["0.19215670424132", "0.18663683901393", "0.22177739201759",
             "0.09623007655432", "0.30319904778284"],
        ),
        shu_osher=None,
        ref_ssp=1.0, ref_error_const=2.14944e-02, ref_storage="naive",
    ))

    add(MethodRecord(
        id="ssp53_w2", name="SSP53_W2", s=5, p=3,
        tableau=_tableau(
            [
                ["0.713497331193829"],
                ["0.133505249805329", "0.133505249805329"],
                ["0.133505249805329", "0.133505249805329", "0.713497331193829"],
                ["0.133505249805329", "0.133505249805329", "0.149579395628566",
                 "0.149579395628565"],
            ],
            ["0.133505249805329", "0.133505249805329", "0.216758180868589",
             "0.131760203399484", "0.384471116121269"],
        ),
        shu_osher=None,
        ref_ssp=1.40154693827206, ref_error_const=2.88494e-02,
        ref_storage="naive",
    ))

    add(MethodRecord(
        id="ssp53_vdh", name="SSP53_vdH", s=5, p=3,
        tableau=_tableau(
            [
                ["0.674381436593749"],
                ["0.174481959220521", "0.116638367147961"],
                ["0.174481959220521", "0.116638367147961", "0.674381436593749"],
                ["0.174481959220521", "0.116638367147961", "0.162995387938952",
                 "0.162995387938952"],
            ],
            ["0.174481959220521", "0.116638367147961", "0.162995387938952",
             "0.106256369067643", "0.439627916624922"],
        ),
        shu_osher=None,
        ref_ssp=1.482840341885634, ref_error_const=2.55799e-02,
        ref_storage="naive",
    ))

    return reg


_REGISTRY = _build_registry()

# Table row order used by the summary command, matching the published table.
TABLE1_IDS = (
    "ssp53_2nstar_1", "ssp53_2nstar_2", "ssp53_1", "ssp53_r", "ssp53_2",
    "ssp53_h", "ssp43", "ssp53_w1", "ssp53_w2", "ssp53_vdh",
)

_ALIASES = {"fe": "ssp1_1", "euler": "ssp1_1"}
_FAMILY_ID = re.compile(r"^ssp([12])_(\d+)$")


def ssp_first_order(s: int) -> MethodRecord:
    """Optimal s-stage first order method: all coefficients 1/s, radius s."""
    if s < 1:
        raise DimensionMismatch("first order family needs s >= 1")
    a = Fraction(1, s)
    A = np.zeros((s, s))
    A[np.tril_indices(s, k=-1)] = float(a)
    b = np.full(s, float(a))
    lam = np.zeros((s + 1, s + 1))
    gam = np.zeros((s + 1, s + 1))
    for i in range(1, s + 1):
        lam[i, i - 1] = 1.0
        gam[i, i - 1] = float(a)
    return MethodRecord(
        id=f"ssp1_{s}", name=f"SSP({s},1)", s=s, p=1,
        tableau=ButcherTableau(A=A, b=b),
        shu_osher=ShuOsherForm(lam=lam, gam=gam),
        ref_ssp=float(s), ref_error_const=None, ref_storage="2N*",
    )


def ssp_second_order(s: int) -> MethodRecord:
    """Optimal s-stage second order method: radius s - 1.

    The convex form is s - 1 repeated Euler substeps of size h/(s-1) followed
    by one averaged combination carrying weight 1/s on the input state.
    """
    if s < 2:
        raise DimensionMismatch("second order family needs s >= 2")
    a = Fraction(1, s - 1)
    wb = Fraction(1, s)
    A = np.zeros((s, s))
    A[np.tril_indices(s, k=-1)] = float(a)
    b = np.full(s, float(wb))
    lam = np.zeros((s + 1, s + 1))
    gam = np.zeros((s + 1, s + 1))
    for i in range(1, s):
        lam[i, i - 1] = 1.0
        gam[i, i - 1] = float(a)
    lam[s, 0] = float(wb)
    lam[s, s - 1] = float(1 - wb)
    gam[s, s - 1] = float(wb)
    return MethodRecord(
        id=f"ssp2_{s}", name=f"SSP({s},2)", s=s, p=2,
        tableau=ButcherTableau(A=A, b=b),
        shu_osher=ShuOsherForm(lam=lam, gam=gam),
        ref_ssp=float(s - 1), ref_error_const=None, ref_storage="2N*",
    )


def lookup(method_id: str) -> MethodRecord:
    """Fetch a record by id, alias, or family pattern ``ssp1_<s>/ssp2_<s>``."""
    method_id = _ALIASES.get(method_id, method_id)
    if method_id in _REGISTRY:
        return _REGISTRY[method_id]
    m = _FAMILY_ID.match(method_id)
    if m:
        order, s = int(m.group(1)), int(m.group(2))
        if s >= (1 if order == 1 else 2):
            return ssp_first_order(s) if order == 1 else ssp_second_order(s)
    raise UnknownMethod(
        f"unknown method {method_id!r}; known ids: {', '.join(sorted(_REGISTRY))}, "
        "ssp1_<s>, ssp2_<s>, fe"
    )


def list_methods() -> list[MethodRecord]:
    """All fixed registry records, catalog order."""
    order = ("ssp33", "ssp43", "ssp53_r", "ssp53_h", "ssp53_1", "ssp53_2",
             "ssp53_2nstar_1", "ssp53_2nstar_2", "ssp53_w1", "ssp53_w2",
             "ssp53_vdh")
    return [_REGISTRY[k] for k in order]


def export_json(method_id: str) -> dict:
    """Method document: name, stage count, A, b, optional form, order."""
    rec = lookup(method_id)
    doc: dict = {
        "name": rec.id,
        "s": rec.s,
        "A": [[float(x) for x in row] for row in rec.tableau.A],
        "b": [float(x) for x in rec.tableau.b],
    }
    if rec.shu_osher is not None:
        doc["shu_osher"] = {
            "Lambda": [[float(x) for x in row] for row in rec.shu_osher.lam],
            "Gamma": [[float(x) for x in row] for row in rec.shu_osher.gam],
        }
    doc["order"] = rec.p
    return doc


def method_from_json(doc: dict) -> MethodRecord:
    """Build a record from a method document (reference data left unset)."""
    tableau = ButcherTableau(A=np.asarray(doc["A"], float),
                             b=np.asarray(doc["b"], float))
    form = None
    if doc.get("shu_osher"):
        form = ShuOsherForm(
            lam=np.asarray(doc["shu_osher"]["Lambda"], float),
            gam=np.asarray(doc["shu_osher"]["Gamma"], float),
        )
    return MethodRecord(
        id=str(doc.get("name", "external")), name=str(doc.get("name", "external")),
        s=tableau.s, p=int(doc.get("order", 0)), tableau=tableau, shu_osher=form,
        ref_ssp=None, ref_error_const=None, ref_storage=None,
    )
