import random

import pytest

from uzannot.annotation import (
    AnnotatedSentence,
    AnnotationMode,
    AnnotationUnit,
    ParseError,
    Punctuation,
    Severity,
    parse_line,
    serialize_line,
    validate,
)

from conftest import random_valid_sentence

M = AnnotationMode.MORPHOLOGICAL
S = AnnotationMode.SYNTACTIC


class TestParse:
    def test_multi_tag_unit(self):
        s = parse_line(
            "Anvar/SOT to'satdan/HRV eshik/NOT yoniga/JOT keldi/SFL/3B/OTZ", M
        )
        assert len(s.items) == 5
        last = s.items[-1]
        assert last.words == ("keldi",)
        assert last.tags == ("SFL", "3B", "OTZ")

    def test_multiword_unit(self):
        s = parse_line("Anvar/EG to'satdan/VH eshik+yoniga/OH keldi/FK", S)
        assert len(s.items) == 4
        assert s.items[2].words == ("eshik", "yoniga")
        assert s.items[2].tags == ("OH",)

    def test_three_word_unit(self):
        s = parse_line("Ilon/NOT yassi/XSF yuzada/JOT harakatlana+olmaydi/KFSQ", M)
        assert s.items[3].words == ("harakatlana", "olmaydi")
        assert s.items[3].tags == ("KFSQ",)

    def test_trailing_slash_is_error(self):
        with pytest.raises(ParseError, match="empty tag code"):
            parse_line("abc/", M)

    def test_lowercase_tag_is_error(self):
        with pytest.raises(ParseError, match="lowercase"):
            parse_line("abc/sot", M)

    def test_empty_word_in_multiword_unit(self):
        with pytest.raises(ParseError, match="empty word"):
            parse_line("a++b", M)

    def test_punctuation_lexed_out_of_tag_tail(self):
        s = parse_line("olasiz/SFL/2K/KEZ, ertaga/PRV", M)
        assert isinstance(s.items[1], Punctuation)
        assert s.items[1].char == ","
        assert s.items[0].tags == ("SFL", "2K", "KEZ")

    def test_untagged_word(self):
        s = parse_line("emas, ishlash/HFL", M)
        assert s.items[0].tags == ()
        assert isinstance(s.items[1], Punctuation)

    def test_empty_line_is_error(self):
        with pytest.raises(ParseError):
            parse_line("   ", M)


class TestSerialize:
    def test_example_line(self):
        line = "Anvar/SOT to'satdan/HRV eshik/NOT yoniga/JOT keldi/SFL/3B/OTZ"
        assert serialize_line(parse_line(line, M)) == line

    def test_untagged_unit_with_comma(self):
        s = AnnotatedSentence(
            mode=M, items=(AnnotationUnit(("emas",)), Punctuation(","))
        )
        assert serialize_line(s) == "emas,"

    def test_golden_lines_roundtrip(self, golden_lines):
        for mode, line in golden_lines:
            assert serialize_line(parse_line(line, mode)) == line

    def test_random_roundtrip(self, seed_registry):
        rng = random.Random(20220607)
        for _ in range(200):
            s = random_valid_sentence(seed_registry, rng)
            assert parse_line(serialize_line(s), s.mode) == s


class TestValidate:
    def test_golden_lines_no_errors(self, seed_registry, golden_lines):
        for mode, line in golden_lines:
            report = validate(parse_line(line, mode), seed_registry)
            assert report.errors == []

    def test_m2_first_tag_not_base(self, seed_registry):
        s = parse_line("keldi/3B/SFL", M)
        report = validate(s, seed_registry)
        assert [f.rule for f in report.errors] == ["M2", "M3"]

    def test_m1_unknown_code(self, seed_registry):
        report = validate(parse_line("keldi/SFL/ZZZ", M), seed_registry)
        assert any(f.rule == "M1" for f in report.errors)

    def test_m1_kind_mismatch(self, seed_registry):
        # syntactic tag used in morphological mode
        report = validate(parse_line("keldi/EG", M), seed_registry)
        assert [f.rule for f in report.errors] == ["M1"]

    def test_m3_duplicate_person_number(self, seed_registry):
        report = validate(parse_line("keldi/SFL/3B/1B", M), seed_registry)
        assert any(f.rule == "M3" for f in report.errors)

    def test_m3_tense_before_person_number(self, seed_registry):
        report = validate(parse_line("keldi/SFL/OTZ/3B", M), seed_registry)
        assert any(f.rule == "M3" for f in report.errors)

    def test_s1_multi_tag_syntactic_unit(self, seed_registry):
        report = validate(parse_line("keldi/EG/FK", S), seed_registry)
        assert [f.rule for f in report.errors] == ["S1"]

    def test_u1_untagged_warning(self, seed_registry):
        report = validate(parse_line("emas, ishlash/HFL", M), seed_registry)
        assert report.errors == []
        assert [f.rule for f in report.warnings] == ["U1"]

    def test_findings_sorted_by_item_index(self, seed_registry):
        report = validate(parse_line("a/ZZZ b/SFL c/YYY d", M), seed_registry)
        indices = [f.item_index for f in report.findings]
        assert indices == sorted(indices)

    def test_punctuation_not_flagged(self, seed_registry):
        report = validate(parse_line("keldi/SFL, ketdi/SFL.", M), seed_registry)
        assert report.findings == ()

    def test_generated_sentences_have_no_errors(self, seed_registry):
        rng = random.Random(7)
        for _ in range(200):
            s = random_valid_sentence(seed_registry, rng)
            assert validate(s, seed_registry).errors == []


class TestTypes:
    def test_unit_rejects_bad_word(self):
        with pytest.raises(ValueError):
            AnnotationUnit(("a/b",))

    def test_unit_rejects_bad_tag(self):
        with pytest.raises(ValueError):
            AnnotationUnit(("abc",), ("lower",))

    def test_punctuation_rejects_letters(self):
        with pytest.raises(ValueError):
            Punctuation("a")

    def test_sentence_needs_items(self):
        with pytest.raises(ValueError):
            AnnotatedSentence(mode=M, items=())
