#!/usr/bin/env python3
"""Writes the expected decoding of every tri-state wire input.

Independent of the C++ decoder: the table is derived from the field rules
below, not from running the library. Output columns:

    field  context  input  policy  expected

`input` is the JSON literal placed in the field. `context` is the strategy
present in the same object (price rows only). `expected` is one of
Unknown, NotApplicable, Present, Error.
"""

import json
import sys

VALUES = {
    "strategy": "limit order",
    "symbol": "600519",
    "order_type": "buy",
    "price": 1800.0,
    "quantity": 200,
}
NULLISH = ["null", "NULL", "none", "None"]
POLICIES = ["strict", "lenient"]


def non_price(inp, policy):
    if inp is None:
        return "Unknown"
    if isinstance(inp, str) and inp in NULLISH:
        return "Error" if policy == "strict" else "Unknown"
    return "Present"


def price(inp, policy, context):
    if inp is None:
        return "Unknown"
    if inp == "None":
        # The not-applicable marker is only meaningful when no limit order is declared.
        if context == "limit":
            return "Error" if policy == "strict" else "Unknown"
        return "NotApplicable"
    if isinstance(inp, str) and inp in NULLISH:
        return "Error" if policy == "strict" else "Unknown"
    if context == "market":
        return "Error" if policy == "strict" else "NotApplicable"
    return "Present"


def rows():
    for field in ["strategy", "symbol", "order_type", "quantity"]:
        for inp in [None, *NULLISH, VALUES[field]]:
            for policy in POLICIES:
                yield field, "-", inp, policy, non_price(inp, policy)
    for context in ["limit", "market", "unknown"]:
        for inp in [None, *NULLISH, VALUES["price"]]:
            for policy in POLICIES:
                yield "price", context, inp, policy, price(inp, policy, context)


def main(out):
    out.write("# field\tcontext\tinput\tpolicy\texpected\n")
    for field, context, inp, policy, expected in rows():
        out.write(f"{field}\t{context}\t{json.dumps(inp)}\t{policy}\t{expected}\n")


if __name__ == "__main__":
    main(sys.stdout)
