import pytest

from courseaide.gateway import (
    CompletionRequest,
    DeadlineExceeded,
    Gateway,
    MockRule,
    ProviderRejected,
    ScriptedMockProvider,
    UnparseableVerdict,
    make_provider,
)

from conftest import make_mock


def gw(mock, **kwargs):
    kwargs.setdefault("backoff_s", 0.0)
    return Gateway(mock, **kwargs)


def test_scripted_rule_matches_substring():
    mock = make_mock([("PING", "PONG")])
    result = gw(mock).complete(CompletionRequest(prompt="please PING the server"))
    assert result.text == "PONG"
    assert result.provider_id == "scripted-mock"
    assert result.attempts == 1


def test_first_matching_rule_wins():
    mock = make_mock([("alpha", "first"), ("alpha beta", "second")])
    assert gw(mock).complete(CompletionRequest(prompt="alpha beta")).text == "first"


def test_default_response_when_no_rule_matches():
    mock = make_mock([("PING", "PONG")], default="fallback")
    assert gw(mock).complete(CompletionRequest(prompt="nothing")).text == "fallback"


def test_retries_until_success():
    mock = make_mock([("PING", "PONG")])
    mock.fail_times = 2
    result = gw(mock, retries=3).complete(CompletionRequest(prompt="PING"))
    assert result.text == "PONG"
    assert result.attempts == 3
    assert len(mock.calls) == 3


def test_retries_exhausted_raises_deadline_error():
    mock = make_mock()
    mock.fail_always = True
    with pytest.raises(DeadlineExceeded) as exc_info:
        gw(mock, retries=2).complete(CompletionRequest(prompt="x", request_id="req-9"))
    assert len(mock.calls) == 3  # initial try + 2 retries
    assert exc_info.value.request_id == "req-9"


def test_wall_clock_deadline():
    mock = make_mock()
    mock.fail_always = True
    fake_time = [0.0]

    def clock():
        fake_time[0] += 10.0
        return fake_time[0]

    with pytest.raises(DeadlineExceeded):
        gw(mock, retries=50, deadline_s=15.0, clock=clock).complete(CompletionRequest(prompt="x"))
    assert len(mock.calls) < 5


def test_provider_rejection_is_not_retried():
    class RejectingProvider:
        provider_id = "reject"

        def complete(self, prompt, temperature, max_output_chars):
            raise ProviderRejected("bad request")

    with pytest.raises(ProviderRejected):
        gw(RejectingProvider()).complete(CompletionRequest(prompt="x"))


def test_truncation_flag():
    mock = make_mock(default="a" * 100)
    result = gw(mock).complete(CompletionRequest(prompt="x", max_output_chars=10))
    assert result.truncated is True
    assert result.text == "a" * 10


def test_yes_no_parsing():
    assert gw(make_mock(default="Yes.")).yes_no("is it?") is True
    assert gw(make_mock(default="no")).yes_no("is it?") is False
    assert gw(make_mock(default="YES, definitely")).yes_no("is it?") is True


def test_yes_no_unparseable():
    with pytest.raises(UnparseableVerdict):
        gw(make_mock(default="maybe")).yes_no("is it?")


def test_yes_no_does_not_match_prefix_words():
    with pytest.raises(UnparseableVerdict):
        gw(make_mock(default="yesterday it was")).yes_no("is it?")


def test_script_file_loading(tmp_path):
    script = tmp_path / "mock.yaml"
    script.write_text(
        "rules:\n"
        "  - contains: PING\n"
        "    response: PONG\n"
        "default: nothing scripted\n",
        encoding="utf-8",
    )
    mock = ScriptedMockProvider.from_file(str(script))
    assert mock.rules == [MockRule(contains="PING", response="PONG")]
    assert mock.default_response == "nothing scripted"


def test_make_provider():
    provider = make_provider({"provider": "scripted", "default": "hi"})
    assert isinstance(provider, ScriptedMockProvider)
    with pytest.raises(ValueError):
        make_provider({"provider": "telepathy"})


def test_concurrent_requests_all_complete():
    import threading

    mock = make_mock(default="ok")
    gateway = gw(mock, max_concurrency=2)
    results = []

    def worker():
        results.append(gateway.complete(CompletionRequest(prompt="x")).text)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == ["ok"] * 8
