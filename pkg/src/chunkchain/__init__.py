"""chunkchain: an ephemeral, LAN-only blockchain chat platform for classrooms.

Students chat over a real hash-linked proof-of-work ledger and unlock
inspection tools by completing missions; teachers run the node and get a
small analytics toolkit (topic weighting, pretest/posttest statistics).
Nothing is ever written to disk: close the node and the chain is gone.
"""

__version__ = "0.1.0"
