"""Regenerates the 20-document fixture: posts20.jsonl and posts20.emb.

Two topical groups of eight documents sit 60 degrees apart in embedding space,
one document lies halfway between them, and three documents point elsewhere.
"""
import json
import struct
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
DIM = 16

POSTS = [
    # group A: Helene flooding
    ("X", "101", "u1", "WeatherNewsAnchor", "Flood waters rising in Asheville tonight. Stay safe and avoid the river roads!", "helene"),
    ("X", "102", "u2", "CatholicMomOf3", "We are praying for everyone in Asheville. The flood took our neighbors homes.", "helene"),
    ("YouTube", "201", "c1", "StormChaserTV", "Drone footage of the flood in Asheville. The river destroyed the roads and bridges.", "helene"),
    ("Reddit", "301", "r1", "mountain_dad_77", "Our town has no power and the river flood keeps rising. Roads are gone.", "helene"),
    ("X", "103", "u3", "bot84736251", "FLOOD ALERT Asheville river roads closed. Power outage reported.", "helene"),
    ("Reddit", "302", "r2", "xx_1234_xx", "Anyone know if the Asheville water plant is back? The flood wiped out power.", "helene"),
    ("YouTube", "202", "c2", "LocalNews13", "Asheville flood update: river crest tonight, roads closed, power crews waiting.", "helene"),
    ("X", "104", "u1", "WeatherNewsAnchor", "Power crews cannot reach Asheville because the flood closed every road.", "helene"),
    # bridge between the groups
    ("Reddit", "303", "r3", "ReliefVolunteerNurse", "Both storms hit us. Helene flood in Asheville and now Milton wind in Tampa. Send water and supplies.", "milton"),
    # group B: Milton evacuation
    ("X", "105", "u4", "TampaRealtor", "Milton evacuation orders for Tampa. Leave now, traffic on the interstate is heavy.", "milton"),
    ("X", "106", "u2", "CatholicMomOf3", "We evacuated Tampa before Milton. Praying the wind spares our home.", "milton"),
    ("YouTube", "203", "c3", "HurricaneTrackerLive", "Milton landfall near Tampa. Wind gusts and storm surge on the coast.", "milton"),
    ("Reddit", "304", "r4", "gulfcoast_teacher", "Evacuation traffic out of Tampa is terrible. Gas stations empty before Milton.", "milton"),
    ("X", "107", "u5", "user99887766", "MILTON WIND Tampa evacuation now. Storm surge warning for the coast.", "milton"),
    ("YouTube", "204", "c1", "StormChaserTV", "Inside the eye of Milton. Tampa wind and surge footage from the coast.", "milton"),
    ("Reddit", "305", "r5", "SarasotaGrandma", "Our coast town evacuated for Milton. Storm surge and wind are scary.", "milton"),
    ("X", "108", "u6", "ConservativeTexan", "Tampa evacuation went well. Milton surge smaller than feared on the coast.", "milton"),
    # unrelated documents
    ("X", "109", "u7", "gamer_girl_2000", "New game release this weekend, anyone playing?", "other"),
    ("YouTube", "205", "c4", "CookingWithDad", "Easy pasta recipe for busy weeknights.", "other"),
    ("Reddit", "306", "r6", "QuietLibrarian", "Book club picks for next month are in.", "other"),
]


def unit(v):
    return v / np.linalg.norm(v)


def main():
    rng = np.random.default_rng(20241015)
    a = np.zeros(DIM)
    a[0] = 1.0
    b = np.zeros(DIM)
    b[0], b[1] = 0.5, np.sqrt(3.0) / 2.0
    mid = unit(a + b)

    rows = []
    for i in range(len(POSTS)):
        if i < 8:
            base = a
        elif i == 8:
            base = mid
        elif i < 17:
            base = b
        else:
            base = np.zeros(DIM)
            base[2 + i - 17] = 1.0
        noise = np.zeros(DIM)
        noise[5:] = rng.normal(scale=0.04, size=DIM - 5)
        rows.append(unit(base + noise).astype("<f4"))

    ids = [f"{p[0]}:{p[1]}" for p in POSTS]
    with open(HERE / "posts20.jsonl", "w", encoding="utf-8") as out:
        for ts, (platform, post_id, user_id, username, text, event) in enumerate(POSTS):
            out.write(json.dumps({
                "platform": platform, "post_id": post_id, "user_id": user_id, "username": username,
                "text": text, "event": event, "timestamp": 1727740800 + 3600 * ts,
            }) + "\n")

    blob = bytearray(b"EMB1")
    blob += struct.pack("<II", len(ids), DIM)
    for doc_id in ids:
        raw = doc_id.encode("utf-8")
        blob += struct.pack("<I", len(raw)) + raw
    for row in rows:
        blob += row.tobytes()
    (HERE / "posts20.emb").write_bytes(bytes(blob))


if __name__ == "__main__":
    main()
