"""Prompt templating, the scripted mock, the live HTTP backend, and the
prompt catalog's pinned baseline."""
import json
import threading

import pytest

from witforge.backend import (
    AuthError,
    CompletionRequest,
    DecodingParams,
    GPT_LOL_BODY,
    LiveBackend,
    MissingBinding,
    PromptTemplate,
    RateLimited,
    ScriptExhausted,
    ScriptedMockBackend,
    TEMPLATE_IDS,
    TransportError,
    UnknownPlaceholder,
    load_catalog,
    render_template,
    scripted_mock,
)

GERMANY = "Germany has given animals legal rights in their constitution."


# --- templates ---------------------------------------------------------------

def test_gpt_lol_render_is_byte_exact():
    catalog = load_catalog()
    got = render_template(catalog.get("gpt_lol"), {"sentence": GERMANY})
    assert got == "You want to be funny. Respond to this: " + GERMANY


def test_render_without_placeholders_is_identity():
    template = PromptTemplate(id="t", body="no placeholders here")
    assert render_template(template, {}) == "no placeholders here"


def test_render_missing_binding():
    catalog = load_catalog()
    with pytest.raises(MissingBinding):
        render_template(catalog.get("gpt_lol"), {})


def test_render_unknown_binding():
    template = PromptTemplate(id="t", body="{x}")
    with pytest.raises(UnknownPlaceholder):
        render_template(template, {"x": "1", "y": "2"})


def test_duplicate_placeholder_rejected():
    with pytest.raises(ValueError):
        PromptTemplate(id="t", body="{x} and {x}")


def test_decoding_params_validate():
    with pytest.raises(ValueError):
        DecodingParams(temperature=-0.1)
    with pytest.raises(ValueError):
        DecodingParams(top_p=0.0)
    with pytest.raises(ValueError):
        DecodingParams(max_tokens=0)


# --- catalog -----------------------------------------------------------------

def test_catalog_has_every_template():
    catalog = load_catalog()
    for template_id in TEMPLATE_IDS:
        assert catalog.get(template_id).id == template_id


def test_gpt_lol_decoding_pinned():
    template = load_catalog().get("gpt_lol")
    assert template.body == GPT_LOL_BODY
    assert template.decoding.temperature == 0.7
    assert template.decoding.top_p == 1.0


def test_gpt_lol_decoding_override_refused():
    with pytest.raises(ValueError):
        load_catalog(decoding_overrides={"gpt_lol": DecodingParams(temperature=0.0)})


def test_gpt_lol_body_override_refused(tmp_path):
    (tmp_path / "gpt_lol.txt").write_text("Be funny: {sentence}\n")
    with pytest.raises(ValueError):
        load_catalog(tmp_path)


def test_custom_dir_overrides_other_templates(tmp_path):
    (tmp_path / "handle_selection.txt").write_text("Pick two from: {sentence}\n")
    catalog = load_catalog(tmp_path)
    assert catalog.get("handle_selection").body == "Pick two from: {sentence}"
    # untouched ids still come from the packaged set
    assert catalog.get("gpt_lol").body == GPT_LOL_BODY


def test_selection_template_decodes_greedy():
    assert load_catalog().get("candidate_selection").decoding.temperature == 0.0


# --- scripted mock -----------------------------------------------------------

def _request(template_id="handle_selection", prompt="p"):
    return CompletionRequest(prompt=prompt, template_id=template_id)


def test_mock_pops_in_order():
    backend = scripted_mock({"handle_selection": ["pigs; San Antonio", "second"]})
    assert backend.complete(_request()).text == "pigs; San Antonio"
    assert backend.complete(_request()).text == "second"


def test_mock_exhaustion():
    backend = scripted_mock({})
    with pytest.raises(ScriptExhausted):
        backend.complete(_request())


def test_mock_replay_is_deterministic():
    script = {"handle_selection": ["a", "b"], "gpt_lol": ["c"]}
    seq = [("handle_selection",), ("gpt_lol",), ("handle_selection",)]
    runs = []
    for _ in range(2):
        backend = ScriptedMockBackend(script)
        runs.append([backend.complete(_request(t[0])).text for t in seq])
    assert runs[0] == runs[1] == ["a", "c", "b"]


def test_mock_concurrent_pops_never_duplicate():
    n = 50
    backend = scripted_mock({"gpt_lol": [f"r{i}" for i in range(n)]})
    got = []
    lock = threading.Lock()

    def worker():
        text = backend.complete(_request("gpt_lol")).text
        with lock:
            got.append(text)

    threads = [threading.Thread(target=worker) for _ in range(n)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(got) == sorted(f"r{i}" for i in range(n))


def test_mock_records_requests():
    backend = scripted_mock({"gpt_lol": ["ha"]})
    backend.complete(_request("gpt_lol", prompt="You want to be funny. Respond to this: x"))
    assert backend.calls[0].template_id == "gpt_lol"
    assert backend.calls[0].prompt.endswith("x")


def test_mock_from_file(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(json.dumps({"gpt_lol": ["ha"]}))
    backend = ScriptedMockBackend.from_file(path)
    assert backend.complete(_request("gpt_lol")).text == "ha"


# --- live backend ------------------------------------------------------------

class _FakeResponse:
    def __init__(self, status_code, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        if isinstance(self._payload, Exception):
            raise self._payload
        return self._payload


def _ok(text="hello", finish="stop"):
    return _FakeResponse(200, {"choices": [{"text": text, "finish_reason": finish}]})


def _live(responses, sleeps=None):
    calls = {"bodies": [], "n": 0}

    def post(url, json=None, headers=None, timeout=None):
        calls["bodies"].append(json)
        response = responses[min(calls["n"], len(responses) - 1)]
        calls["n"] += 1
        if isinstance(response, Exception):
            raise response
        return response

    slept = sleeps if sleeps is not None else []
    backend = LiveBackend(
        api_key="k", endpoint="https://example.test/v1/completions",
        model_id="m", post=post, sleep=slept.append,
    )
    return backend, calls, slept


def test_live_requires_credential():
    with pytest.raises(AuthError):
        LiveBackend(api_key="", endpoint="https://example.test", model_id="m")


def test_live_success_carries_decoding():
    backend, calls, _ = _live([_ok("  funny  ")])
    result = backend.complete(CompletionRequest(
        prompt="p", template_id="gpt_lol",
        decoding=DecodingParams(temperature=0.7, top_p=1.0, max_tokens=128),
    ))
    assert result.text == "funny"
    body = calls["bodies"][0]
    assert body["temperature"] == 0.7
    assert body["top_p"] == 1.0
    assert body["prompt"] == "p"


def test_live_auth_failure_is_terminal():
    backend, calls, _ = _live([_FakeResponse(401)])
    with pytest.raises(AuthError):
        backend.complete(_request())
    assert calls["n"] == 1


def test_live_rate_limit_retries_with_backoff():
    backend, calls, slept = _live([_FakeResponse(429), _FakeResponse(429), _ok("ok")])
    assert backend.complete(_request()).text == "ok"
    assert calls["n"] == 3
    assert slept == [1.0, 2.0]


def test_live_retries_exhaust_to_error():
    backend, calls, slept = _live([_FakeResponse(429)])
    with pytest.raises(RateLimited):
        backend.complete(_request())
    assert calls["n"] == 4  # initial + 3 retries
    assert slept == [1.0, 2.0, 4.0]


def test_live_server_error_retries():
    backend, calls, _ = _live([_FakeResponse(500), _ok("ok")])
    assert backend.complete(_request()).text == "ok"
    assert calls["n"] == 2


def test_live_network_error_retries():
    backend, calls, _ = _live([ConnectionError("boom"), _ok("ok")])
    assert backend.complete(_request()).text == "ok"
    assert calls["n"] == 2


def test_live_empty_completion_is_transport_error():
    backend, _, _ = _live([_ok("")])
    with pytest.raises(TransportError):
        backend.complete(_request())


def test_live_malformed_body_is_transport_error():
    backend, _, _ = _live([_FakeResponse(200, {"nope": True})])
    with pytest.raises(TransportError):
        backend.complete(_request())


def test_request_requires_prompt():
    with pytest.raises(ValueError):
        CompletionRequest(prompt="", template_id="gpt_lol")
