import json

import pytest

from approxcat.approx import (
    AddCategory,
    ExtCategory,
    left_approx_add,
    left_approx_ext,
    member_add,
)
from approxcat.counterex import (
    LoopQuiverConfig,
    assemble_member,
    build_standard,
    refute,
)
from approxcat.errors import CertificateError
from approxcat.extfilt import member_filt
from approxcat.fields import FieldSpec
from approxcat.matrix import Matrix
from approxcat.quiver import a2_quiver
from approxcat.rep import Rep, RepMorphism, hom_basis
from approxcat.serialize import (
    approx_certificate_from_jsonable,
    certificate_to_jsonable,
    evidence_from_jsonable,
    evidence_to_jsonable,
    filtration_certificate_from_jsonable,
    handle_from_jsonable,
    handle_to_jsonable,
    morphism_from_jsonable,
    morphism_to_jsonable,
    refutation_witness_from_jsonable,
    rep_from_jsonable,
    rep_to_jsonable,
    verify_certificate,
)

Q = FieldSpec.rationals()
F2 = FieldSpec.prime(2)
A2 = a2_quiver()


def p1(field):
    return Rep(A2, field, [1, 1], {"a": Matrix(field, 1, 1, [1])})


def through_json(data):
    return json.loads(json.dumps(data, sort_keys=True))


class TestValueRoundTrips:
    def test_rep(self):
        r = p1(F2)
        back = rep_from_jsonable(A2, F2, through_json(rep_to_jsonable(r)))
        assert back == r

    def test_rational_rep(self):
        r = Rep(A2, Q, [2, 1], {"a": Matrix(Q, 1, 2, ["1/2", 3])})
        data = through_json(rep_to_jsonable(r))
        assert data["maps"]["a"] == [["1/2", 3]]
        assert rep_from_jsonable(A2, Q, data) == r

    def test_zero_dimension_maps(self):
        s1 = Rep.simple(A2, F2, 0)
        back = rep_from_jsonable(A2, F2, through_json(rep_to_jsonable(s1)))
        assert back == s1
        assert back.map("a").rows == 0 and back.map("a").cols == 1

    def test_morphism(self):
        s2 = Rep.simple(A2, F2, 1)
        f = hom_basis(s2, p1(F2))[0]
        back = morphism_from_jsonable(A2, F2, through_json(morphism_to_jsonable(f)))
        assert back.source == f.source and back.target == f.target
        assert back.components == f.components

    def test_handles(self):
        s1 = Rep.simple(A2, F2, 0)
        s2 = Rep.simple(A2, F2, 1)
        handle = ExtCategory(AddCategory([s1]), AddCategory([s2, p1(F2)]))
        back = handle_from_jsonable(A2, F2, through_json(handle_to_jsonable(handle)))
        assert back == handle

    def test_empty_handle(self):
        empty = AddCategory([], quiver=A2, field=F2)
        back = handle_from_jsonable(A2, F2, through_json(handle_to_jsonable(empty)))
        assert back == empty

    def test_evidence(self):
        s1 = Rep.simple(A2, F2, 0)
        ev = member_add(s1, AddCategory([s1, p1(F2)]))
        back = evidence_from_jsonable(A2, F2, through_json(evidence_to_jsonable(ev)))
        assert back.multiplicities == ev.multiplicities
        assert back.iso.components == ev.iso.components


class TestApproxCertificates:
    def test_add_approximation_round_trip(self):
        s1 = Rep.simple(A2, F2, 0)
        cert = left_approx_add(s1, AddCategory([p1(F2)]))
        data = through_json(certificate_to_jsonable(cert))
        assert data["type"] == "approximation" and data["format"] == 1
        assert verify_certificate(data)
        back = approx_certificate_from_jsonable(data)
        assert back.verify()
        assert back.morphism.components == cert.morphism.components

    def test_ext_approximation_round_trip(self):
        s1 = Rep.simple(A2, F2, 0)
        s2 = Rep.simple(A2, F2, 1)
        cert = left_approx_ext(s2, AddCategory([s1]), AddCategory([p1(F2)]))
        data = through_json(certificate_to_jsonable(cert))
        assert verify_certificate(data)
        assert data["evidence"]["kind"] == "ext"

    def test_tampered_entry_detected(self):
        s1 = Rep.simple(A2, F2, 0)
        cert = left_approx_add(s1, AddCategory([p1(F2)]))
        data = through_json(certificate_to_jsonable(cert))
        data["morphism"]["components"][0] = [[0]]
        assert not verify_certificate(data)

    def test_tampered_side_detected(self):
        s1 = Rep.simple(A2, F2, 0)
        cert = left_approx_add(s1, AddCategory([p1(F2)]))
        data = through_json(certificate_to_jsonable(cert))
        data["side"] = "right"
        assert not verify_certificate(data)

    def test_serialization_is_deterministic(self):
        s1 = Rep.simple(A2, F2, 0)
        cert = left_approx_add(s1, AddCategory([p1(F2)]))
        a = json.dumps(certificate_to_jsonable(cert), sort_keys=True)
        b = json.dumps(certificate_to_jsonable(cert), sort_keys=True)
        assert a == b


class TestFiltrationCertificates:
    def test_round_trip(self):
        s1 = Rep.simple(A2, F2, 0)
        s2 = Rep.simple(A2, F2, 1)
        cert = member_filt(p1(F2), [s2, s1], 2)
        data = through_json(certificate_to_jsonable(cert))
        assert data["type"] == "filtration"
        assert verify_certificate(data)
        back = filtration_certificate_from_jsonable(data)
        assert back.verify()
        assert back.depth == cert.depth
        assert back.member == cert.member

    def test_tampered_member_detected(self):
        s1 = Rep.simple(A2, F2, 0)
        s2 = Rep.simple(A2, F2, 1)
        cert = member_filt(p1(F2), [s2, s1], 2)
        data = through_json(certificate_to_jsonable(cert))
        data["member"]["maps"]["a"] = [[0]]
        assert not verify_certificate(data)

    def test_broken_filtration_is_a_sound_negative(self):
        s1 = Rep.simple(A2, F2, 0)
        s2 = Rep.simple(A2, F2, 1)
        cert = member_filt(p1(F2), [s2, s1], 2)
        data = through_json(certificate_to_jsonable(cert))
        del data["filtration"]["steps"][0]
        assert not verify_certificate(data)


class TestRefutationWitnesses:
    def test_round_trip(self):
        cfg = LoopQuiverConfig(2, F2)
        member, ev = assemble_member(cfg, 0, 1, [])
        _, s2, _ = build_standard(cfg)
        phi = hom_basis(s2, member)[0]
        witness = refute(phi, ev)
        data = through_json(certificate_to_jsonable(witness))
        assert data["type"] == "refutation"
        assert verify_certificate(data)
        back = refutation_witness_from_jsonable(data)
        assert back.verify()
        assert back.i0 == witness.i0 and back.w == witness.w

    def test_tampered_index_detected(self):
        cfg = LoopQuiverConfig(2, F2)
        member, ev = assemble_member(cfg, 0, 1, [])
        _, s2, _ = build_standard(cfg)
        witness = refute(hom_basis(s2, member)[0], ev)
        data = through_json(certificate_to_jsonable(witness))
        data["i0"] = 2
        assert not verify_certificate(data)


class TestEnvelope:
    def _any_cert_data(self):
        s1 = Rep.simple(A2, F2, 0)
        cert = left_approx_add(s1, AddCategory([p1(F2)]))
        return through_json(certificate_to_jsonable(cert))

    def test_format_checked(self):
        data = self._any_cert_data()
        data["format"] = 2
        with pytest.raises(CertificateError):
            verify_certificate(data)

    def test_type_checked(self):
        data = self._any_cert_data()
        data["type"] = "blessing"
        with pytest.raises(CertificateError):
            verify_certificate(data)
        del data["type"]
        with pytest.raises(CertificateError):
            verify_certificate(data)

    def test_object_required(self):
        with pytest.raises(CertificateError):
            verify_certificate([1, 2, 3])

    def test_missing_content_field_is_negative(self):
        data = self._any_cert_data()
        del data["morphism"]["components"]
        assert not verify_certificate(data)
