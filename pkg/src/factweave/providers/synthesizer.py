"""Rule-based stand-in for the live LLM, one handler per task.

Responses are pure functions of the prompt payload, so a seeded mock run is
bit-reproducible end to end. The rules aim for plausible rather than clever:
real judgment lives in the live model, fixtures pin exact cases, and this
covers everything else.
"""

from __future__ import annotations

import re
from decimal import Decimal

from ..extraction.quantity import (
    NotAQuantity,
    SCALE_MULTIPLIERS,
    display_quantity,
    find_quantities,
    normalize_quantity,
    quantity_magnitude,
)
from ..textutil import STOPWORDS, content_stems, overlap, split_sentences, stem, tokenize
from ..organization.merging import key_is_ordinal, time_profile, unit_family
from ..model import DataPoint

_BOILERPLATE_MARKERS = (
    "cookie",
    "subscribe",
    "newsletter",
    "advertis",
    "sponsored",
    "copyright",
    "©",
    "all rights reserved",
    "follow us",
    "share this",
    "sign up",
    "privacy policy",
    "terms of service",
    "related articles",
    "read more",
    "click here",
)

_QUERY_SUFFIXES = (
    "statistics",
    "trends data",
    "survey results",
    "growth figures",
    "demographic breakdown",
)

_RELATIVE_TIME_RE = re.compile(r"\b(this year|currently|today|as of now)\b", re.I)

_MAGNITUDE_TOL = Decimal("1e-9")

# words that never make useful data-point labels or topics
_LABEL_STOPLIST = {"year", "years", "decade", "percent", "cent", "per", "each", "average"}

# the distinguishing phrase usually follows the reporting verb
_PREDICATES = {"cited", "said", "counted", "show", "shows", "showed", "found", "put", "reported"}

_ABBREV_RE = re.compile(r"^(?:[A-Za-z]\.)+$")


def _magnitudes_close(a: Decimal, b: Decimal) -> bool:
    return abs(a - b) <= _MAGNITUDE_TOL * max(Decimal(1), abs(a), abs(b))


def _clean_word(word: str) -> str:
    """Drop a trailing sentence period but keep dotted abbreviations intact."""
    if _ABBREV_RE.match(word):
        return word
    return word.rstrip(".")


def _is_abbrev(word: str) -> bool:
    return "." in word


def _title_word(word: str) -> str:
    word = _clean_word(word)
    return word.upper() if _is_abbrev(word) else word.capitalize()


class RuleBasedSynthesizer:
    """Dispatches each task name to its deterministic handler."""

    def respond(self, task_name: str, payload: dict) -> dict:
        handler = getattr(self, f"_{task_name}", None)
        if handler is None:
            raise KeyError(f"no synthesizer rule for task {task_name!r}")
        return handler(payload)

    # --- retrieval ------------------------------------------------------------

    def _expand_query(self, payload: dict) -> dict:
        query = payload["query"]
        n = payload["n_variants"]
        core_tokens = [t for t in tokenize(query) if t not in STOPWORDS]
        core = " ".join(core_tokens) or query.lower()
        variants = []
        for suffix in _QUERY_SUFFIXES:
            candidate = f"{core} {suffix}"
            if candidate.lower() != query.lower():
                variants.append(candidate)
            if len(variants) == n:
                break
        return {"variants": variants}

    # --- extraction -----------------------------------------------------------

    def _filter_title(self, payload: dict) -> dict:
        keep = []
        for para in payload["paragraphs"]:
            low = para["text"].lower()
            if not any(marker in low for marker in _BOILERPLATE_MARKERS):
                keep.append(para["index"])
        return {"keep_indices": keep}

    def _filter_query(self, payload: dict) -> dict:
        query_stems = content_stems(payload["query"])
        keep = []
        for para in payload["paragraphs"]:
            if content_stems(para["text"]) & query_stems:
                keep.append(para["index"])
        return {"keep_indices": keep}

    def _identify_facts(self, payload: dict) -> dict:
        facts = []
        for sentence in split_sentences(payload["paragraph"]):
            tokens = find_quantities(sentence)
            if any(not t.year for t in tokens):
                facts.append({"content": sentence})
        return {"facts": facts}

    def _extract_data_points(self, payload: dict) -> dict:
        content = payload["content"]
        published_year = payload.get("article", {}).get("published_year") or 0
        points = self._rule_points(content, published_year)
        return {
            "data_points": [
                {
                    "label": p.label,
                    "value": str(p.value),
                    "unit": p.unit,
                    "series_key": p.series_key,
                }
                for p in points
            ]
        }

    def _rule_points(self, content: str, published_year: int) -> list[DataPoint]:
        tokens = find_quantities(content)
        qty = [t for t in tokens if not t.year]
        years = [t for t in tokens if t.year]
        if not qty:
            return []

        # align mixed count scales to the largest scale word present
        families = {unit_family(t.unit) for t in qty}
        if families <= {"count", "unitless"} and len(families) > 1:
            scales = [t.unit.split()[0] for t in qty if t.unit and t.unit.split()[0] in SCALE_MULTIPLIERS]
            if scales:
                target = max(scales, key=lambda s: SCALE_MULTIPLIERS[s])
                qty = [
                    type(t)(
                        t.text,
                        t.start,
                        t.end,
                        *normalize_quantity(t.text, align_to=target),
                        False,
                    )
                    for t in qty
                ]

        words = list(re.finditer(r"[A-Za-z][A-Za-z.]*", content))

        def usable(word: str) -> bool:
            low = _clean_word(word).lower()
            return (
                bool(low)
                and low not in STOPWORDS
                and low not in SCALE_MULTIPLIERS
                and low not in _LABEL_STOPLIST
                and not any(ch.isdigit() for ch in low)
            )

        def window_label(start: int, end: int, fallback_before: int) -> str:
            window = [w.group(0) for w in words if start <= w.start() < end]
            picks = [w for w in window if usable(w)]
            for i, w in enumerate(window):
                if _clean_word(w).lower() in _PREDICATES:
                    after = [v for v in window[i + 1 :] if usable(v)]
                    if after:
                        picks = after[:2]
                        break
            else:
                picks = picks[-2:]
            if not picks:
                picks = [w.group(0) for w in words if w.start() < fallback_before and usable(w.group(0))][-2:]
            if not picks:
                picks = ["Value"]
            return " ".join(_title_word(w) for w in picks)

        points: list[DataPoint] = []
        for i, t in enumerate(qty):
            window_end = qty[i + 1].start if i + 1 < len(qty) else len(content)
            label = window_label(t.end, window_end, t.start)

            series_key = None
            if len(years) == len(qty) and len(qty) >= 2:
                series_key = str(int(years[i].value))
            elif len(years) == 1:
                series_key = str(int(years[0].value))
            elif _RELATIVE_TIME_RE.search(content) and published_year:
                series_key = str(published_year)
            points.append(DataPoint(label=label, value=t.value, unit=t.unit, series_key=series_key))
        return points

    def _validate_facts(self, payload: dict) -> dict:
        issues = []
        for fact in payload["facts"]:
            fid = fact["id"]
            content = fact["content"]
            source = payload["sources"][fid]
            source_tokens = [t for t in find_quantities(source) if not t.year]
            source_mags = [quantity_magnitude(t.value, t.unit) for t in source_tokens]
            content_tokens = [t for t in find_quantities(content) if not t.year]

            for token in content_tokens:
                mag = quantity_magnitude(token.value, token.unit)
                if not any(_magnitudes_close(mag, sm) for sm in source_mags):
                    issues.append(
                        {
                            "fact_id": fid,
                            "kind": "content_mismatch",
                            "detail": f"{token.text!r} is not stated by the source paragraph",
                            "suggested_fix": "restate the fact from the source sentence",
                        }
                    )
                    break

            point_mags = []
            wrong_value = False
            for p in fact["data_points"]:
                try:
                    mag = quantity_magnitude(Decimal(p["value"]), p["unit"])
                except Exception:
                    mag = None
                point_mags.append(mag)
                if mag is None or not any(_magnitudes_close(mag, sm) for sm in source_mags):
                    wrong_value = True
                    fix = "re-extract the value from the source"
                    if source_tokens and mag is not None:
                        closest = min(source_tokens, key=lambda t: abs(quantity_magnitude(t.value, t.unit) - mag))
                        fix = f"correct the value to {display_quantity(closest.value, closest.unit)} as the source states"
                    issues.append(
                        {
                            "fact_id": fid,
                            "kind": "wrong_value",
                            "detail": f"extracted value {p['value']} {p['unit']} does not match the source",
                            "suggested_fix": fix,
                        }
                    )

            # a wrong-value fix re-extracts everything, so skip redundant flags
            covered = [m for m in point_mags if m is not None]
            for token in content_tokens:
                if wrong_value:
                    break
                mag = quantity_magnitude(token.value, token.unit)
                if any(_magnitudes_close(mag, sm) for sm in source_mags) and not any(
                    _magnitudes_close(mag, c) for c in covered
                ):
                    issues.append(
                        {
                            "fact_id": fid,
                            "kind": "missing_data_point",
                            "detail": f"{token.text!r} has no extracted data point",
                            "suggested_fix": f"add a data point for {token.text}",
                        }
                    )

            fams = []
            scales = []
            for p in fact["data_points"]:
                fam = unit_family(p["unit"])
                if fam not in fams:
                    fams.append(fam)
                first = p["unit"].split()[0] if p["unit"] else ""
                if first in SCALE_MULTIPLIERS and first not in scales:
                    scales.append(first)
            if len(fams) > 1 or len(scales) > 1:
                issues.append(
                    {
                        "fact_id": fid,
                        "kind": "unit_inconsistency",
                        "detail": f"units mix {fams + scales}",
                        "suggested_fix": "normalize all points to one unit",
                    }
                )
        return {"issues": issues}

    def _refine_facts(self, payload: dict) -> dict:
        flagged: dict[str, list[str]] = {}
        for issue in payload["issues"]:
            flagged.setdefault(issue["fact_id"], []).append(issue["kind"])
        out = []
        for fact in payload["facts"]:
            fid = fact["id"]
            kinds = flagged.get(fid, [])
            if not kinds:
                continue
            content = fact["content"]
            source = payload["sources"][fid]
            published_year = payload.get("published_years", {}).get(fid, 0)
            if "content_mismatch" in kinds:
                content = self._best_source_sentence(content, source)
            points = self._rule_points(content, published_year)
            out.append(
                {
                    "id": fid,
                    "content": content,
                    "data_points": [
                        {"label": p.label, "value": str(p.value), "unit": p.unit, "series_key": p.series_key}
                        for p in points
                    ],
                }
            )
        return {"facts": out}

    @staticmethod
    def _best_source_sentence(content: str, source: str) -> str:
        sentences = split_sentences(source)
        if not sentences:
            return content
        return max(sentences, key=lambda s: (overlap(s, content), -len(s)))

    # --- organization ---------------------------------------------------------

    def _cluster_topic(self, payload: dict) -> dict:
        counts: dict[str, int] = {}
        first_form: dict[str, str] = {}
        for content in payload["contents"]:
            for token in tokenize(content):
                if (
                    token in STOPWORDS
                    or len(token) < 3
                    or any(ch.isdigit() for ch in token)
                    or token in _LABEL_STOPLIST
                ):
                    continue
                key = stem(token)
                counts[key] = counts.get(key, 0) + 1
                if key not in first_form or len(token) < len(first_form[key]):
                    first_form[key] = token
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        words = [_title_word(first_form[k]) for k, _ in ranked[:2]]
        return {"topic": " ".join(words) if words else "General Figures"}

    def _cluster_summary(self, payload: dict) -> dict:
        contents = payload["contents"]
        example = contents[0] if contents else ""
        summary = (
            f"Covers {len(contents)} quantitative facts on {payload['topic'].lower()}. "
            f"For example: {example}"
        )
        return {"summary": summary}

    def _refine_topics(self, payload: dict) -> dict:
        taken: set[str] = set()
        out = []
        for cluster in payload["clusters"]:
            topic = " ".join(cluster["topic"].split()[:4])
            if topic.lower() in taken:
                extra = next(
                    (
                        _title_word(w)
                        for w in tokenize(cluster["summary"])
                        if w not in STOPWORDS and _title_word(w) not in topic.split() and len(w) > 3
                    ),
                    None,
                )
                candidate = f"{topic} {extra}" if extra else f"{topic} (2)"
                topic = " ".join(candidate.split()[:4])
                n = 2
                while topic.lower() in taken:
                    topic = " ".join(f"{cluster['topic']} ({n})".split()[:4])
                    n += 1
            taken.add(topic.lower())
            out.append({"cluster_id": cluster["cluster_id"], "topic": topic})
        return {"topics": out}

    def _build_fact_sets(self, payload: dict) -> dict:
        facts = payload["facts"]

        def signature(fact: dict):
            parts = []
            for p in fact["data_points"]:
                mag = quantity_magnitude(Decimal(p["value"]), p["unit"])
                parts.append((str(mag), unit_family(p["unit"]), p.get("series_key") or ""))
            return tuple(sorted(parts))

        def labels(fact: dict):
            return tuple(sorted(p["label"].lower() for p in fact["data_points"]))

        groups: list[dict] = []
        for fact in facts:
            sig = signature(fact)
            placed = False
            for g in groups:
                if g["sig"] == sig and any(overlap(fact["content"], c) >= 0.3 for c in g["contents"]):
                    g["fact_ids"].append(fact["id"])
                    g["facts"].append(fact)
                    g["contents"].append(fact["content"])
                    placed = True
                    break
            if not placed:
                groups.append(
                    {
                        "sig": sig,
                        "fact_ids": [fact["id"]],
                        "facts": [fact],
                        "contents": [fact["content"]],
                        "conflicting": False,
                    }
                )

        # same claim (matching labels and wording), same keys/family, but a
        # different magnitude: the sets contradict each other
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                a, b = groups[i], groups[j]
                keys_a = {(fam, key) for _, fam, key in a["sig"]}
                keys_b = {(fam, key) for _, fam, key in b["sig"]}
                if a["sig"] == b["sig"] or keys_a != keys_b:
                    continue
                contradiction = any(
                    labels(fa) == labels(fb) and overlap(fa["content"], fb["content"]) >= 0.3
                    for fa in a["facts"]
                    for fb in b["facts"]
                )
                if contradiction:
                    a["conflicting"] = True
                    b["conflicting"] = True

        return {"sets": [{"fact_ids": g["fact_ids"], "conflicting": g["conflicting"]} for g in groups]}

    def _merge_fact_sets(self, payload: dict) -> dict:
        sets = payload["fact_sets"]
        groups: list[dict] = []
        for fs in sets:
            points = [
                DataPoint(label=p["label"], value=Decimal(p["value"]), unit=p["unit"], series_key=p.get("series_key"))
                for p in fs["points"]
            ]
            profile = time_profile(fs["contents"], points, anchor_year=fs.get("anchor_year") or 0)
            family = unit_family(points[0].unit) if points else "unitless"
            ordinal = all(key_is_ordinal(p.series_key or p.label) for p in points)
            if fs.get("conflicting") or self._is_complete_distribution(points):
                groups.append({"ids": [fs["id"]], "closed": True})
                continue
            placed = False
            for g in groups:
                if g.get("closed"):
                    continue
                if g["family"] != family or g["ordinal"] != ordinal:
                    continue
                if all(self._profile_pair_ok(profile, other) for other in g["profiles"]):
                    g["ids"].append(fs["id"])
                    g["profiles"].append(profile)
                    placed = True
                    break
            if not placed:
                groups.append(
                    {"ids": [fs["id"]], "family": family, "ordinal": ordinal, "profiles": [profile], "closed": False}
                )
        return {"groups": [g["ids"] for g in groups]}

    @staticmethod
    def _is_complete_distribution(points: list[DataPoint]) -> bool:
        """Percent parts already summing to a whole tell a finished story."""
        if len(points) < 2 or any(unit_family(p.unit) != "%" for p in points):
            return False
        total = sum(p.value for p in points)
        return Decimal("95") <= total <= Decimal("105")

    @staticmethod
    def _profile_pair_ok(a, b) -> bool:
        if a is None or b is None:
            return True
        if a.kind == "point" and b.kind == "point":
            return True
        if a.kind == "span" and b.kind == "span":
            return not (a.end < b.start or b.end < a.start) and a.granularity == b.granularity
        return False

    def _fill_entity(self, payload: dict) -> dict:
        from ..organization.entities import find_entity_of_kind

        kind = payload["missing_kind"]
        known = payload.get("known_values", [])
        paragraphs = payload["article_paragraphs"]
        text = " ".join(paragraphs)
        match = find_entity_of_kind(text, kind, prefer=known)
        if match is None:
            return {"filled_content": None}
        content = payload["fact_content"].rstrip()
        trailing = ""
        if content.endswith("."):
            content, trailing = content[:-1], "."
        if match.endswith(".") and trailing == ".":
            trailing = ""
        return {"filled_content": f"{content} {match}{trailing}"}

    # --- story generation -----------------------------------------------------

    def _narrative(self, payload: dict) -> dict:
        points = payload["points"]
        pieces = []
        for i, p in enumerate(points):
            value_text = display_quantity(Decimal(p["value"]), p["unit"])
            sentence = f'{p["label"]} was <span class="hl-{i}">{value_text}</span>'
            key = p.get("series_key")
            if key:
                sentence += f" in {key}"
            pieces.append(sentence + ".")
        caption = " ".join(pieces)
        first = points[0]
        title_value = display_quantity(Decimal(first["value"]), first["unit"])
        title = " ".join(f'{first["label"]}: {title_value}'.split()[:8])
        return {"title": title, "caption_html": caption}

    def _recommend_chart(self, payload: dict) -> dict:
        points = payload["points"]
        n = len(points)
        units = [p["unit"] for p in points]
        keys = [p.get("series_key") or p["label"] for p in points]
        all_percent = all(unit_family(u) == "%" for u in units)
        if n == 0:
            return {"kind": "text"}
        if n == 1:
            return {"kind": "isotype" if all_percent else "text"}
        if all(key_is_ordinal(k) for k in keys) and len(set(keys)) >= 2:
            return {"kind": "line"}
        if all_percent:
            total = sum(Decimal(p["value"]) for p in points)
            if Decimal("95") <= total <= Decimal("105") and all(Decimal(p["value"]) >= 0 for p in points):
                return {"kind": "pie"}
            return {"kind": "bar"}
        return {"kind": "bar"}

    def _order_units(self, payload: dict) -> dict:
        units = payload["units"]
        ranked = sorted(units, key=lambda u: (-Decimal(str(u.get("max_relevance", "0"))), u["id"]))
        return {"order": [u["id"] for u in ranked]}

    def _detect_entities(self, payload: dict) -> dict:
        from ..organization.entities import rule_based_entities

        return {
            "entities": [
                {"text": e.text, "kind": e.kind, "start": e.span[0], "end": e.span[1]}
                for e in rule_based_entities(payload["text"])
            ]
        }
