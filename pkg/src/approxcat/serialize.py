"""JSON forms for representations, morphisms, handles, evidence and
certificates.

Every certificate serializes to a dict carrying "format": 1 and a "type"
tag plus enough context (quiver, field) to rebuild the objects from the
file alone. verify_certificate re-runs the certificate's own verification
on the rebuilt objects, so stored certificates never have to be trusted:
tampering shows up as a False, not as a crash.
"""

from .approx import (
    AddCategory,
    AddEvidence,
    ApproxCertificate,
    ExtCategory,
    ExtEvidence,
)
from .counterex import LoopQuiverConfig, RefutationWitness
from .errors import ApproxcatError, CertificateError
from .extfilt import FiltrationCertificate, OrderedFamily
from .fields import FieldSpec
from .matrix import Matrix
from .quiver import Quiver
from .rep import Filtration, Rep, RepMorphism, ShortExactSeq

FORMAT = 1


def _need(data, key):
    if not isinstance(data, dict) or key not in data:
        raise CertificateError(f"missing field {key!r}")
    return data[key]


def rep_to_jsonable(rep: Rep) -> dict:
    return {
        "dims": list(rep.dims),
        "maps": {a.id: rep.map(a.id).to_jsonable() for a in rep.quiver.arrows},
    }


def rep_from_jsonable(quiver: Quiver, field: FieldSpec, data) -> Rep:
    dims = [int(d) for d in _need(data, "dims")]
    if len(dims) != quiver.vertex_count:
        raise CertificateError("one dimension per vertex required")
    maps_data = data.get("maps", {})
    maps = {}
    for a in quiver.arrows:
        if a.id in maps_data:
            maps[a.id] = Matrix.from_jsonable(
                field, maps_data[a.id], rows=dims[a.target], cols=dims[a.source]
            )
        else:
            # an omitted arrow acts as zero
            maps[a.id] = Matrix.zeros(field, dims[a.target], dims[a.source])
    return Rep(quiver, field, dims, maps)


def morphism_to_jsonable(f: RepMorphism) -> dict:
    return {
        "source": rep_to_jsonable(f.source),
        "target": rep_to_jsonable(f.target),
        "components": [c.to_jsonable() for c in f.components],
    }


def morphism_from_jsonable(quiver: Quiver, field: FieldSpec, data) -> RepMorphism:
    source = rep_from_jsonable(quiver, field, _need(data, "source"))
    target = rep_from_jsonable(quiver, field, _need(data, "target"))
    blocks = _need(data, "components")
    if len(blocks) != quiver.vertex_count:
        raise CertificateError("one component per vertex required")
    comps = [
        Matrix.from_jsonable(field, b, rows=target.dims[x], cols=source.dims[x])
        for x, b in enumerate(blocks)
    ]
    # naturality is the certificate verifier's job, not the parser's
    return RepMorphism(source, target, comps, check=False)


def ses_to_jsonable(s: ShortExactSeq) -> dict:
    return {"i": morphism_to_jsonable(s.i), "p": morphism_to_jsonable(s.p)}


def ses_from_jsonable(quiver: Quiver, field: FieldSpec, data) -> ShortExactSeq:
    return ShortExactSeq(
        morphism_from_jsonable(quiver, field, _need(data, "i")),
        morphism_from_jsonable(quiver, field, _need(data, "p")),
    )


def handle_to_jsonable(handle) -> dict:
    if isinstance(handle, AddCategory):
        return {
            "kind": "add",
            "generators": [rep_to_jsonable(g) for g in handle.generators],
        }
    if isinstance(handle, ExtCategory):
        return {
            "kind": "ext",
            "left": handle_to_jsonable(handle.left),
            "right": handle_to_jsonable(handle.right),
        }
    raise CertificateError(f"not a handle: {handle!r}")


def handle_from_jsonable(quiver: Quiver, field: FieldSpec, data):
    kind = _need(data, "kind")
    if kind == "add":
        gens = [rep_from_jsonable(quiver, field, g) for g in _need(data, "generators")]
        return AddCategory(gens, quiver=quiver, field=field)
    if kind == "ext":
        return ExtCategory(
            handle_from_jsonable(quiver, field, _need(data, "left")),
            handle_from_jsonable(quiver, field, _need(data, "right")),
        )
    raise CertificateError(f"unknown handle kind {kind!r}")


def evidence_to_jsonable(ev) -> dict:
    if isinstance(ev, AddEvidence):
        return {
            "kind": "add",
            "multiplicities": list(ev.multiplicities),
            "iso": morphism_to_jsonable(ev.iso),
        }
    if isinstance(ev, ExtEvidence):
        return {
            "kind": "ext",
            "ses": ses_to_jsonable(ev.ses),
            "sub_evidence": evidence_to_jsonable(ev.sub_evidence),
            "quot_evidence": evidence_to_jsonable(ev.quot_evidence),
        }
    raise CertificateError(f"not membership evidence: {ev!r}")


def evidence_from_jsonable(quiver: Quiver, field: FieldSpec, data):
    kind = _need(data, "kind")
    if kind == "add":
        mults = tuple(int(c) for c in _need(data, "multiplicities"))
        return AddEvidence(mults, morphism_from_jsonable(quiver, field, _need(data, "iso")))
    if kind == "ext":
        return ExtEvidence(
            ses_from_jsonable(quiver, field, _need(data, "ses")),
            evidence_from_jsonable(quiver, field, _need(data, "sub_evidence")),
            evidence_from_jsonable(quiver, field, _need(data, "quot_evidence")),
        )
    raise CertificateError(f"unknown evidence kind {kind!r}")


def filtration_to_jsonable(f: Filtration) -> dict:
    return {"steps": [morphism_to_jsonable(s) for s in f.steps]}


def filtration_from_jsonable(quiver: Quiver, field: FieldSpec, data) -> Filtration:
    steps = [morphism_from_jsonable(quiver, field, s) for s in _need(data, "steps")]
    return Filtration(steps)


def config_to_jsonable(cfg: LoopQuiverConfig) -> dict:
    return {"n_loops": cfg.n_loops, "field": cfg.field.label}


def config_from_jsonable(data) -> LoopQuiverConfig:
    return LoopQuiverConfig(
        int(_need(data, "n_loops")), FieldSpec.from_label(_need(data, "field"))
    )


def approx_certificate_to_jsonable(cert: ApproxCertificate) -> dict:
    quiver = cert.morphism.source.quiver
    field = cert.morphism.source.field
    return {
        "format": FORMAT,
        "type": "approximation",
        "quiver": quiver.to_jsonable(),
        "field": field.label,
        "side": cert.side,
        "morphism": morphism_to_jsonable(cert.morphism),
        "handle": handle_to_jsonable(cert.handle),
        "evidence": evidence_to_jsonable(cert.evidence),
    }


def approx_certificate_from_jsonable(data) -> ApproxCertificate:
    quiver = Quiver.from_jsonable(_need(data, "quiver"))
    field = FieldSpec.from_label(_need(data, "field"))
    return ApproxCertificate(
        side=_need(data, "side"),
        morphism=morphism_from_jsonable(quiver, field, _need(data, "morphism")),
        handle=handle_from_jsonable(quiver, field, _need(data, "handle")),
        evidence=evidence_from_jsonable(quiver, field, _need(data, "evidence")),
    )


def filtration_certificate_to_jsonable(cert: FiltrationCertificate) -> dict:
    quiver = cert.member.quiver
    field = cert.member.field
    return {
        "format": FORMAT,
        "type": "filtration",
        "quiver": quiver.to_jsonable(),
        "field": field.label,
        "member": rep_to_jsonable(cert.member),
        "family": [rep_to_jsonable(g) for g in cert.family.members],
        "filtration": filtration_to_jsonable(cert.filtration),
        "factor_assignments": [
            evidence_to_jsonable(ev) for ev in cert.factor_assignments
        ],
    }


def filtration_certificate_from_jsonable(data) -> FiltrationCertificate:
    quiver = Quiver.from_jsonable(_need(data, "quiver"))
    field = FieldSpec.from_label(_need(data, "field"))
    family = OrderedFamily(
        [rep_from_jsonable(quiver, field, g) for g in _need(data, "family")]
    )
    return FiltrationCertificate(
        filtration=filtration_from_jsonable(quiver, field, _need(data, "filtration")),
        member=rep_from_jsonable(quiver, field, _need(data, "member")),
        family=family,
        factor_assignments=tuple(
            evidence_from_jsonable(quiver, field, ev)
            for ev in _need(data, "factor_assignments")
        ),
    )


def refutation_witness_to_jsonable(witness: RefutationWitness) -> dict:
    return {
        "format": FORMAT,
        "type": "refutation",
        "config": config_to_jsonable(witness.config),
        "candidate": morphism_to_jsonable(witness.candidate),
        "i0": witness.i0,
        "w": rep_to_jsonable(witness.w),
        "w_evidence": evidence_to_jsonable(witness.w_evidence),
        "nonzero_target_map": morphism_to_jsonable(witness.nonzero_target_map),
        "vanishing_proof": [
            [morphism_to_jsonable(f), morphism_to_jsonable(c)]
            for f, c in witness.vanishing_proof
        ],
        "escalated": bool(witness.escalated),
    }


def refutation_witness_from_jsonable(data) -> RefutationWitness:
    cfg = config_from_jsonable(_need(data, "config"))
    quiver = cfg.quiver()
    field = cfg.field
    proof = tuple(
        (
            morphism_from_jsonable(quiver, field, pair[0]),
            morphism_from_jsonable(quiver, field, pair[1]),
        )
        for pair in _need(data, "vanishing_proof")
    )
    return RefutationWitness(
        candidate=morphism_from_jsonable(quiver, field, _need(data, "candidate")),
        i0=int(_need(data, "i0")),
        w=rep_from_jsonable(quiver, field, _need(data, "w")),
        w_evidence=evidence_from_jsonable(quiver, field, _need(data, "w_evidence")),
        nonzero_target_map=morphism_from_jsonable(
            quiver, field, _need(data, "nonzero_target_map")
        ),
        vanishing_proof=proof,
        escalated=bool(data.get("escalated", False)),
        config=cfg,
    )


def certificate_to_jsonable(cert) -> dict:
    if isinstance(cert, ApproxCertificate):
        return approx_certificate_to_jsonable(cert)
    if isinstance(cert, FiltrationCertificate):
        return filtration_certificate_to_jsonable(cert)
    if isinstance(cert, RefutationWitness):
        return refutation_witness_to_jsonable(cert)
    raise CertificateError(f"not a certificate: {cert!r}")


def certificate_from_jsonable(data):
    if not isinstance(data, dict):
        raise CertificateError("a certificate must be a JSON object")
    if data.get("format") != FORMAT:
        raise CertificateError(f"unsupported format {data.get('format')!r}")
    kind = _need(data, "type")
    if kind == "approximation":
        return approx_certificate_from_jsonable(data)
    if kind == "filtration":
        return filtration_certificate_from_jsonable(data)
    if kind == "refutation":
        return refutation_witness_from_jsonable(data)
    raise CertificateError(f"unknown certificate type {kind!r}")


def verify_certificate(data) -> bool:
    """Rebuild a serialized certificate and re-run its verification.

    Envelope problems (not an object, wrong format, missing or unknown
    type) raise CertificateError; a well-enveloped certificate whose
    content fails to rebuild or verify returns False.
    """
    if not isinstance(data, dict):
        raise CertificateError("a certificate must be a JSON object")
    if data.get("format") != FORMAT:
        raise CertificateError(f"unsupported format {data.get('format')!r}")
    kind = _need(data, "type")
    if kind not in ("approximation", "filtration", "refutation"):
        raise CertificateError(f"unknown certificate type {kind!r}")
    try:
        cert = certificate_from_jsonable(data)
    except (ApproxcatError, ValueError, TypeError, KeyError, IndexError):
        return False
    try:
        return bool(cert.verify())
    except ApproxcatError:
        return False
