#!/usr/bin/env python3
# Copyright 2026 The genpower Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the synthetic 20-thread mini-corpus next to this script.

Output is fully determined by the fixed RNG seed; rerunning reproduces the
committed files byte for byte.
"""

import json
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
DOMAIN = "example.com"

# (first, last, gender). First names are unambiguous in the 1931-1977 SSA data.
PEOPLE = [
    ("John", "Harlow", "M"),
    ("Mary", "Okafor", "F"),
    ("Robert", "Lindqvist", "M"),
    ("Linda", "Baptiste", "F"),
    ("Michael", "Ferreira", "M"),
    ("Susan", "Kowalski", "F"),
    ("James", "Whitcombe", "M"),
    ("Barbara", "Nakamura", "F"),
    ("David", "Osei", "M"),
    ("Karen", "Delacroix", "F"),
    ("Patricia", "Munro", "F"),
    ("William", "Adeyemi", "M"),
]

# superior -> subordinate, immediate edges only.
HIERARCHY = [
    ("john", "mary"),
    ("john", "robert"),
    ("mary", "linda"),
    ("mary", "michael"),
    ("robert", "susan"),
    ("robert", "james"),
    ("linda", "barbara"),
    ("linda", "david"),
    ("susan", "karen"),
    ("james", "patricia"),
    ("james", "william"),
]

# Participants whose names do not resolve; one gets a manual override.
OUTSIDERS = [
    {"email": "ops-desk@vendor.net", "name": "Ops Desk"},
    {"email": "kelly.sato@example.com", "name": ""},
]

REQUESTS = [
    "Please send me the revised forecast by Friday.",
    "Can you review the attached contract before the meeting?",
    "I need the final numbers for the board today.",
    "Please set up a call with the legal team this week.",
    "Make sure the invoice goes out before noon.",
]
QUESTIONS = [
    "Did the counterparty sign the amendment?",
    "What is the status of the pipeline capacity report?",
    "When will the audit team be on site?",
    "Do we have the updated credit limits?",
]
INFORMS = [
    "The revised forecast is attached.",
    "I spoke with the counterparty this morning and they agreed to the terms.",
    "The audit team arrives on Tuesday.",
    "Credit limits were updated in the system yesterday.",
    "The invoice went out an hour ago.",
    "I will have the numbers ready by end of day.",
]
CLOSINGS = ["Thanks.", "Thank you.", "Regards.", "Best."]


def mailbox(key):
    for first, last, _ in PEOPLE:
        if first.lower() == key:
            return {"email": f"{first.lower()}.{last.lower()}@{DOMAIN}",
                    "name": f"{first} {last}"}
    raise KeyError(key)


def closed_hierarchy():
    sup = {}
    for a, b in HIERARCHY:
        sup.setdefault(a, set()).add(b)
    changed = True
    while changed:
        changed = False
        for a in list(sup):
            for b in list(sup[a]):
                extra = sup.get(b, set()) - sup[a]
                if extra:
                    sup[a] |= extra
                    changed = True
    return sup


def build_threads(rng):
    closure = closed_hierarchy()
    related = sorted((a, b) for a in closure for b in closure[a])
    keys = [first.lower() for first, _, _ in PEOPLE]
    threads = []
    for t in range(20):
        boss, sub = related[(7 * t) % len(related)]
        others = [k for k in keys if k not in (boss, sub)]
        extra = rng.sample(others, rng.randint(1, 2))
        cast = [boss, sub] + extra
        outsider = OUTSIDERS[t % 2] if t % 5 == 3 else None
        base = 1_000_000 + 86_400 * t
        msgs = []
        n = rng.randint(3, 5)
        for i in range(n):
            if i == 0:
                sender = boss
                to = [sub]
                cc = [extra[0]]
                body = " ".join([f"Hi {sub.capitalize()},", rng.choice(REQUESTS),
                                 rng.choice(QUESTIONS), rng.choice(CLOSINGS)])
                parent = None
            else:
                prev = msgs[rng.randrange(len(msgs))]
                sender = rng.choice([sub, sub, boss] + extra)
                prev_sender = prev["_sender"]
                if prev_sender == sender:
                    prev_sender = boss if sender != boss else sub
                to = [prev_sender]
                cc = [k for k in cast if k not in (sender, prev_sender)][: rng.randint(0, 2)]
                if sender == boss:
                    parts = [rng.choice(REQUESTS), rng.choice(CLOSINGS)]
                elif sender == sub:
                    parts = [rng.choice(INFORMS), rng.choice(INFORMS), rng.choice(CLOSINGS)]
                else:
                    parts = [rng.choice(QUESTIONS), rng.choice(INFORMS)]
                body = " ".join(parts)
                parent = prev["msg_id"]
            ts = base + 600 * i + rng.randint(0, 300)
            hh, rem = divmod(ts % 86_400, 3600)
            mm, ss = divmod(rem, 60)
            day = 1 + (ts // 86_400) % 28
            msg = {
                "msg_id": f"t{t:02d}m{i}",
                "timestamp": f"2001-03-{day:02d}T{hh:02d}:{mm:02d}:{ss:02d}-06:00",
                "from": mailbox(sender),
                "to": [mailbox(k) for k in to],
                "cc": [mailbox(k) for k in cc],
                "body": body,
                "_sender": sender,
            }
            if parent is not None:
                msg["parent_id"] = parent
            if outsider is not None and i == 1:
                msg["cc"].append(dict(outsider))
            msgs.append(msg)
        for m in msgs:
            del m["_sender"]
        threads.append({"thread_id": f"mini-{t:02d}", "messages": msgs})
    return threads


def main():
    rng = random.Random(20010301)
    threads = build_threads(rng)
    with open(os.path.join(HERE, "threads.jsonl"), "w", encoding="utf-8", newline="\n") as f:
        for t in threads:
            f.write(json.dumps(t, ensure_ascii=False, sort_keys=False) + "\n")
    with open(os.path.join(HERE, "hierarchy.csv"), "w", encoding="utf-8", newline="\n") as f:
        for a, b in HIERARCHY:
            f.write(f"{mailbox(a)['email']},{mailbox(b)['email']}\n")
    with open(os.path.join(HERE, "overrides.csv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("kelly.sato@example.com,F,team-roster\n")


if __name__ == "__main__":
    main()
