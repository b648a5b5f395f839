#!/usr/bin/env python3
"""Regenerates data/fixture.jsonl, the small synthetic corpus used by the tests.

Each document is a short news-style story from one of four topics. One
sentence per document is site boilerplate drawn from a shared pool; it never
appears in the gold summary and is lexically unrelated to the topic, so a
cluster model can separate it from the story sentences.
"""

import json
import random
import sys

TOPICS = {
    "space": {
        "entities": ["Soyuz", "Orion", "Vostok", "Apollo", "Gemini"],
        "places": ["Kazakhstan", "Florida", "Baikonur", "Houston", "Kourou"],
        "story": [
            "The {e} capsule landed in {p} after a steep descent through the atmosphere.",
            "Three astronauts on board the {e} capsule were reported safe by mission control.",
            "Search helicopters reached the {e} capsule within an hour of the landing in {p}.",
            "Engineers said the {e} capsule drifted hundreds of kilometers off its planned landing zone.",
            "Mission control will review the trajectory data from the {e} capsule next week.",
            "The crew of the {e} capsule had spent six months aboard the orbiting station.",
        ],
        "summary": [
            "{e} capsule landed in {p} after a steep descent.",
            "Astronauts on board the {e} capsule were reported safe.",
            "The {e} capsule drifted off its planned landing zone.",
        ],
    },
    "market": {
        "entities": ["Acme", "Globex", "Initech", "Umbrella", "Vandelay"],
        "places": ["London", "Tokyo", "Frankfurt", "Toronto", "Sydney"],
        "story": [
            "Shares of {e} fell sharply in {p} after quarterly profits missed forecasts.",
            "Analysts said {e} profits were hurt by rising costs and weaker demand.",
            "The chief executive of {e} promised investors a new cost cutting plan.",
            "Trading volume in {e} shares was three times the usual level in {p}.",
            "{e} will report full year results to investors in the spring.",
            "Rival firms also saw their shares slip as investors sold technology stocks.",
        ],
        "summary": [
            "Shares of {e} fell sharply after quarterly profits missed forecasts.",
            "{e} profits were hurt by rising costs.",
            "The chief executive promised a new cost cutting plan.",
        ],
    },
    "storm": {
        "entities": ["Hurricane Ada", "Storm Bella", "Typhoon Cora", "Cyclone Dina", "Storm Elsa"],
        "places": ["the coast", "the islands", "the delta", "the bay", "the valley"],
        "story": [
            "{e} brought heavy rain and strong winds to {p} on Sunday night.",
            "Thousands of homes lost power as {e} knocked down trees and lines.",
            "Emergency crews evacuated families from flooded streets near {p}.",
            "Forecasters warned that {e} would bring more flooding through Tuesday.",
            "Schools and offices across {p} stayed closed while crews cleared roads.",
            "Officials said the damage from {e} could take weeks to repair.",
        ],
        "summary": [
            "{e} brought heavy rain and strong winds to {p}.",
            "Thousands of homes lost power as {e} knocked down trees.",
            "Emergency crews evacuated families from flooded streets.",
        ],
    },
    "match": {
        "entities": ["United", "Rovers", "Athletic", "Wanderers", "City"],
        "places": ["the final", "the derby", "the semifinal", "the cup tie", "the league opener"],
        "story": [
            "{e} won {p} with a late goal from their young striker.",
            "The young striker scored twice as {e} came back from a goal down.",
            "Fans of {e} celebrated in the stadium long after the final whistle.",
            "The coach of {e} praised the defence for a disciplined second half.",
            "{e} will now face the league leaders in the next round.",
            "The visiting side had two goals ruled out for offside in {p}.",
        ],
        "summary": [
            "{e} won {p} with a late goal from their young striker.",
            "The young striker scored twice as {e} came back.",
            "The coach praised the defence.",
        ],
    },
}

BOILERPLATE = [
    "Subscribe to our newsletter for exclusive offers and cookie settings.",
    "Click here to manage cookie settings and subscribe to exclusive newsletter offers.",
    "Exclusive offers arrive when you subscribe to our newsletter and accept cookie settings.",
    "Manage your cookie settings or click here to subscribe for exclusive newsletter offers.",
]


def main(out_path):
    rng = random.Random(7)
    docs = []
    topic_names = list(TOPICS)
    for i in range(20):
        topic = TOPICS[topic_names[i % len(topic_names)]]
        k = i // len(topic_names)
        fill = {"e": topic["entities"][k], "p": topic["places"][k]}
        story = [s.format(**fill) for s in topic["story"]]
        rng.shuffle(story)
        noise = BOILERPLATE[rng.randrange(len(BOILERPLATE))]
        story.insert(rng.randrange(1, 4), noise)
        summary = " ".join(s.format(**fill) for s in topic["summary"])
        summary = summary[0].upper() + summary[1:]
        text = " ".join(s[0].upper() + s[1:] for s in story)
        docs.append({"id": f"doc{i:02d}", "text": text, "summary": summary})
    with open(out_path, "w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/fixture.jsonl")
