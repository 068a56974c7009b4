"""courseaide: an educator-governed RAG course assistant.

Backend pieces: a course knowledge store with top-k cosine retrieval, a
multi-route question dispatcher with homework auto-detection, deterministic
prompt assembly, a mockable LLM gateway, response structuring, an HTTP chat
service, and an analytics engine over the persisted interaction logs.
"""

__version__ = "0.1.0"
