"""Pure, deterministic blockchain core.

Transactions, blocks, SHA-256 hashing over a canonical byte encoding,
Ed25519 signatures, proof-of-work mining, validation and fork choice.
Every operation is a pure function from state to state.
"""

from .chain import (
    drain_for_block,
    make_genesis,
    mempool_add,
    new_chain,
    select_chain,
)
from .crypto import (
    DIGEST_SIZE,
    PUBLIC_KEY_SIZE,
    SIGNATURE_SIZE,
    ZERO_DIGEST,
    ClassroomCipher,
    KeyPair,
    sha256,
    verify_signature,
)
from .encoding import EncodingError, from_hex, to_hex
from .pow import build_block, leading_zero_bits, meets_difficulty, mine, try_nonce
from .types import (
    MAX_BLOCK_TXS,
    MAX_DIFFICULTY,
    MAX_PAYLOAD_BYTES,
    Block,
    BlockHeader,
    ChainState,
    Transaction,
    TxKind,
    compute_tx_root,
    hash_header,
    sign_transaction,
    transaction_signing_bytes,
    verify_transaction,
)
from .validation import CLOCK_SKEW_MS, validate_block, validate_chain

__all__ = [
    "Block",
    "BlockHeader",
    "ChainState",
    "ClassroomCipher",
    "CLOCK_SKEW_MS",
    "DIGEST_SIZE",
    "EncodingError",
    "KeyPair",
    "MAX_BLOCK_TXS",
    "MAX_DIFFICULTY",
    "MAX_PAYLOAD_BYTES",
    "PUBLIC_KEY_SIZE",
    "SIGNATURE_SIZE",
    "Transaction",
    "TxKind",
    "ZERO_DIGEST",
    "build_block",
    "compute_tx_root",
    "drain_for_block",
    "from_hex",
    "hash_header",
    "leading_zero_bits",
    "make_genesis",
    "meets_difficulty",
    "mempool_add",
    "mine",
    "new_chain",
    "select_chain",
    "sha256",
    "sign_transaction",
    "to_hex",
    "transaction_signing_bytes",
    "try_nonce",
    "validate_block",
    "validate_chain",
    "verify_signature",
    "verify_transaction",
]
