import pytest
from hypothesis import given, strategies as st

from wfc.errors import NotAWorkflow, ParseError
from wfc.workflow import canonicalize, parse_workflow, tokenize, tokenize_texts

from conftest import HELLO_WORLD_YAML, TWO_JOB_YAML


class TestParseWorkflow:
    def test_hello_world_structure(self, hello_doc):
        assert len(hello_doc.jobs) == 1
        job = hello_doc.jobs[0]
        assert job.job_id == "build"
        assert len(job.steps) == 4
        assert job.steps[0].uses == "actions/checkout@v2"
        assert job.runs_on == "ubuntu-latest"
        assert job.container_image == "gcc:latest"
        assert hello_doc.triggers == ["push"]

    def test_empty_jobs_rejected(self):
        with pytest.raises(NotAWorkflow):
            parse_workflow("jobs: {}", "r", "w.yml")

    def test_invalid_yaml(self):
        with pytest.raises(ParseError):
            parse_workflow("jobs: [unclosed", "r", "w.yml")

    def test_no_jobs_key(self):
        with pytest.raises(NotAWorkflow):
            parse_workflow("name: x\non: push", "r", "w.yml")

    def test_two_jobs_order(self, two_job_doc):
        assert [j.job_id for j in two_job_doc.jobs] == ["first", "second"]
        assert [len(j.steps) for j in two_job_doc.jobs] == [3, 2]
        assert two_job_doc.jobs[0].steps[1].run == "make install"
        assert two_job_doc.jobs[1].steps[1].name is None

    def test_unknown_keys_preserved(self):
        text = "name: x\nenv:\n  FOO: bar\njobs:\n  j:\n    steps:\n      - run: ls\n"
        doc = parse_workflow(text, "r", "w.yml")
        assert doc.mapping["env"] == {"FOO": "bar"}
        assert '"env": {"FOO": "bar"}' in canonicalize(doc)

    def test_step_raw_block_is_source_text(self, hello_doc):
        assert hello_doc.jobs[0].steps[0].raw_block == "uses: actions/checkout@v2"


class TestCanonicalize:
    def test_hello_world_prefix(self, hello_doc):
        assert canonicalize(hello_doc).startswith(
            '{"name": "hello-world", "on": "push", '
        )

    def test_single_line(self, hello_doc):
        assert "\n" not in canonicalize(hello_doc)

    def test_deterministic(self):
        a = parse_workflow(HELLO_WORLD_YAML, "r", "w.yml")
        b = parse_workflow(HELLO_WORLD_YAML, "r", "w.yml")
        assert canonicalize(a) == canonicalize(b)

    def test_no_with_key_when_absent(self, two_job_doc):
        assert '"with"' not in canonicalize(two_job_doc)

    @pytest.mark.parametrize("text", [HELLO_WORLD_YAML, TWO_JOB_YAML])
    def test_roundtrip(self, text):
        doc = parse_workflow(text, "r", "w.yml")
        again = parse_workflow(canonicalize(doc), "r", "w.yml")
        assert doc.structure_equal(again)
        assert canonicalize(doc) == canonicalize(again)


class TestTokenize:
    def test_uses_fragment(self):
        assert tokenize_texts("uses: actions/checkout@v2") == [
            "uses",
            ":",
            "actions/checkout@v2",
        ]

    def test_empty(self):
        assert tokenize_texts("") == []

    def test_run_command_options(self):
        assert tokenize_texts("run: gradle build --stacktrace") == [
            "run",
            ":",
            "gradle",
            "build",
            "--stacktrace",
        ]

    def test_structural_chars_split(self):
        assert tokenize_texts('{"a": [1, 2]}') == [
            "{", '"', "a", '"', ":", "[", "1", ",", "2", "]", "}",
        ]

    def test_quoted_string_keeps_colons(self):
        # inside quotes only whitespace splits, so URLs survive intact
        assert tokenize_texts('"https://example.com/a.sh"') == [
            '"', "https://example.com/a.sh", '"',
        ]

    def test_newline_escape_is_own_token(self):
        assert tokenize_texts('"make a\\nmake b"') == [
            '"', "make", "a", "\\n", "make", "b", '"',
        ]

    def test_pure_function(self, hello_doc):
        text = canonicalize(hello_doc)
        assert tokenize_texts(text) == tokenize_texts(text)

    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    def test_tokens_never_contain_whitespace(self, text):
        for tok in tokenize_texts(text):
            assert tok
            assert not any(c.isspace() for c in tok)

    def test_stream_wrapper(self, hello_doc):
        stream = tokenize(canonicalize(hello_doc), source=hello_doc)
        assert stream.source is hello_doc
        assert len(stream) == len(stream.texts())
