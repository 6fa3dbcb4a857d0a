"""Post ingestion: record parsing, collection queries, event-window partitioning.

Input records arrive as JSONL (one object per line) or CSV with a fixed
column order. Malformed records are counted and skipped, never fatal:
ingesting large real-world corpora has to be resilient.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, TYPE_CHECKING, Iterable, Union

if TYPE_CHECKING:  # pragma: no cover
    from .classify import LabeledPost

logger = logging.getLogger(__name__)

UTC = dt.timezone.utc

# fixed CSV column order; mentions are | separated
COLUMNS = ("id", "user_id", "created_at", "text", "area",
           "reply_to_user", "retweet_of_user", "mentions")


class RecordError(ValueError):
    """A single record failed validation; carries the skip reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class AreaSpec:
    """A named metropolitan area plus the aliases used to query for it."""

    name: str
    aliases: tuple[str, ...] = ()
    country: str | None = None
    language: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("area name must be nonempty")
        seen: list[str] = []
        for a in self.aliases:
            if a and a != self.name and a not in seen:
                seen.append(a)
        object.__setattr__(self, "aliases", tuple(seen))
        for code in (self.country, self.language):
            if code is not None and not (len(code) == 2 and code.isalpha()):
                raise ValueError(f"country/language codes must be 2 letters, got {code!r}")


@dataclass(frozen=True)
class EventWindow:
    """An event date plus the number of days collected before and after it.

    The window is inclusive on both ends, so it always spans
    ``delta_before + delta_after + 1`` calendar days (UTC).
    """

    event_name: str
    event_date: dt.date
    delta_before: int
    delta_after: int

    def __post_init__(self):
        if not self.event_name:
            raise ValueError("event name must be nonempty")
        for d in (self.delta_before, self.delta_after):
            if not 1 <= d <= 30:
                raise ValueError(f"window deltas must be in [1, 30], got {d}")

    @property
    def start(self) -> dt.date:
        return self.event_date - dt.timedelta(days=self.delta_before)

    @property
    def end(self) -> dt.date:
        return self.event_date + dt.timedelta(days=self.delta_after)

    @property
    def n_days(self) -> int:
        return self.delta_before + self.delta_after + 1

    def days(self) -> list[dt.date]:
        return [self.start + dt.timedelta(days=i) for i in range(self.n_days)]

    def contains(self, day: dt.date) -> bool:
        return self.start <= day <= self.end


@dataclass(frozen=True, kw_only=True)
class Post:
    """One social-media record with interaction metadata.

    ``mentions`` is stored deduplicated with self-mentions removed, and a
    record can carry a reply target or a retweet target but not both (a
    retweet-with-reply is recorded as a reply by the parser).
    """

    id: str
    user_id: str
    created_at: int
    text: str
    area: str
    reply_to_user: str | None = None
    retweet_of_user: str | None = None
    mentions: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.id or not self.user_id:
            raise ValueError("post id and user_id must be nonempty")
        if not isinstance(self.created_at, int) or self.created_at <= 0:
            raise ValueError(f"created_at must be a positive unix timestamp, got {self.created_at!r}")
        if self.reply_to_user is not None and self.retweet_of_user is not None:
            raise ValueError("a post cannot be both a reply and a retweet")
        object.__setattr__(self, "mentions", tuple(self.mentions))

    @property
    def day(self) -> dt.date:
        """UTC calendar day of creation."""
        return dt.datetime.fromtimestamp(self.created_at, tz=UTC).date()

    def interaction_targets(self) -> list[tuple[str, str]]:
        """(kind, target user) pairs for every interaction this post makes."""
        targets: list[tuple[str, str]] = []
        if self.reply_to_user is not None:
            targets.append(("reply", self.reply_to_user))
        if self.retweet_of_user is not None:
            targets.append(("retweet", self.retweet_of_user))
        targets.extend(("mention", m) for m in self.mentions)
        return targets


@dataclass
class ParseReport:
    parsed: int = 0
    skipped: int = 0
    reasons: Counter = field(default_factory=Counter)

    def skip(self, reason: str) -> None:
        self.skipped += 1
        self.reasons[reason] += 1
        logger.debug("skipped record: %s", reason)

    def as_dict(self) -> dict:
        return {"parsed": self.parsed, "skipped": self.skipped,
                "reasons": {k: self.reasons[k] for k in sorted(self.reasons)}}


@dataclass(frozen=True)
class CorpusSummary:
    tweets: int
    users: int
    multi_category_users: int


@dataclass(frozen=True)
class EventPartition:
    """The labeled posts of one area that fall inside one event window."""

    area: AreaSpec
    window: EventWindow
    posts: tuple["LabeledPost", ...]
    day_index: dict[dt.date, tuple[str, ...]]

    @property
    def provenance(self) -> str:
        return f"{self.area.name}|{self.window.event_name}"


def build_query(area: AreaSpec, country: str | None = None,
                language: str | None = None) -> str:
    """Collection query for an area: name AND any of its aliases.

    Filters default to the codes on the AreaSpec; passing them explicitly
    overrides. Shapes:
      no aliases          (("NAME"))
      aliases             (("NAME") AND (("A1") OR ("A2")))
      with filters        ... AND (country:"US") AND (language:"en")
    """
    country = country if country is not None else area.country
    language = language if language is not None else area.language
    for code in (country, language):
        if code is not None and not (len(code) == 2 and code.isalpha()):
            raise ValueError(f"country/language codes must be 2 letters, got {code!r}")
    if area.aliases:
        alias_part = " OR ".join(f'("{a}")' for a in area.aliases)
        query = f'(("{area.name}") AND ({alias_part}))'
    else:
        query = f'(("{area.name}"))'
    if country is not None:
        query += f' AND (country:"{country}")'
    if language is not None:
        query += f' AND (language:"{language}")'
    return query


def _clean_mentions(mentions: Iterable[str], user_id: str) -> tuple[str, ...]:
    seen: list[str] = []
    for m in mentions:
        if m and m != user_id and m not in seen:
            seen.append(m)
    return tuple(seen)


def record_to_post(obj: dict) -> Post:
    """Validate one decoded JSON record and normalize it into a Post.

    Raises RecordError with a machine-readable reason on bad records.
    """
    for key in ("id", "user_id", "created_at", "text", "area"):
        if key not in obj or obj[key] is None:
            raise RecordError("missing_field")
    created = obj["created_at"]
    if isinstance(created, bool) or not isinstance(created, int) or created <= 0:
        raise RecordError("invalid_created_at")
    for key in ("id", "user_id", "text", "area"):
        if not isinstance(obj[key], str):
            raise RecordError("invalid_field")
    for key in ("id", "user_id", "area"):
        if not obj[key]:
            raise RecordError("missing_field")
    reply = obj.get("reply_to_user") or None
    retweet = obj.get("retweet_of_user") or None
    if reply is not None and retweet is not None:
        retweet = None  # retweet-with-reply counts as a reply
    mentions = obj.get("mentions") or []
    if not isinstance(mentions, list) or not all(isinstance(m, str) for m in mentions):
        raise RecordError("invalid_field")
    return Post(
        id=obj["id"], user_id=obj["user_id"], created_at=created,
        text=obj["text"], area=obj["area"],
        reply_to_user=reply, retweet_of_user=retweet,
        mentions=_clean_mentions(mentions, obj["user_id"]),
    )


def _csv_row_to_record(row: list[str]) -> dict:
    if len(row) != len(COLUMNS):
        raise RecordError("malformed")
    obj = dict(zip(COLUMNS, row))
    try:
        obj["created_at"] = int(obj["created_at"])
    except ValueError:
        raise RecordError("invalid_created_at") from None
    obj["mentions"] = [m for m in obj["mentions"].split("|") if m]
    return obj


def _decode(data: Union[bytes, str, IO[bytes], IO[str]]) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    if isinstance(data, str):
        return data
    raw = data.read()
    return raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_records(data: Union[bytes, str, IO[bytes], IO[str]],
                  fmt: str = "jsonl") -> tuple[list[Post], ParseReport]:
    """Parse posts from a JSONL or CSV stream, skipping bad records.

    Records missing a required field, carrying invalid values, or reusing
    an already-seen id are counted in the report and dropped; valid posts
    come back in input order.
    """
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    text = _decode(data)
    report = ParseReport()
    posts: list[Post] = []
    seen_ids: set[str] = set()

    def consume(obj_or_err):
        if isinstance(obj_or_err, RecordError):
            report.skip(obj_or_err.reason)
            return
        try:
            post = record_to_post(obj_or_err)
        except RecordError as exc:
            report.skip(exc.reason)
            return
        if post.id in seen_ids:
            report.skip("duplicate")
            return
        seen_ids.add(post.id)
        posts.append(post)
        report.parsed += 1

    if fmt == "jsonl":
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                consume(RecordError("malformed"))
                continue
            if not isinstance(obj, dict):
                consume(RecordError("malformed"))
                continue
            consume(obj)
    else:
        rows = csv.reader(io.StringIO(text))
        header = next(rows, None)
        if header is not None and tuple(header) != COLUMNS:
            raise ValueError(f"CSV header must be {','.join(COLUMNS)}")
        for row in rows:
            if not row:
                continue
            try:
                consume(_csv_row_to_record(row))
            except RecordError as exc:
                consume(exc)
    return posts, report


def _post_record(post: Post) -> dict:
    return {
        "id": post.id, "user_id": post.user_id, "created_at": post.created_at,
        "text": post.text, "area": post.area,
        "reply_to_user": post.reply_to_user,
        "retweet_of_user": post.retweet_of_user,
        "mentions": list(post.mentions),
    }


def serialize_posts(posts: Iterable[Post], fmt: str = "jsonl") -> bytes:
    """Inverse of parse_records for valid posts (round-trips exactly)."""
    if fmt == "jsonl":
        lines = [json.dumps(_post_record(p), ensure_ascii=False) for p in posts]
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for p in posts:
            writer.writerow([
                p.id, p.user_id, p.created_at, p.text, p.area,
                p.reply_to_user or "", p.retweet_of_user or "",
                "|".join(p.mentions),
            ])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def partition(posts: Iterable["LabeledPost"], area: AreaSpec,
              window: EventWindow) -> EventPartition:
    """Select the labeled posts of one area inside one event window.

    Day membership uses the UTC calendar day of created_at; both window
    ends are inclusive. An empty selection is a valid empty partition.
    """
    selected = [p for p in posts
                if p.area == area.name and window.contains(p.day)]
    by_day: dict[dt.date, list[str]] = {}
    for p in selected:
        by_day.setdefault(p.day, []).append(p.id)
    day_index = {day: tuple(by_day[day]) for day in sorted(by_day)}
    return EventPartition(area=area, window=window,
                          posts=tuple(selected), day_index=day_index)


def summarize_corpus(partitions: Iterable[EventPartition]) -> dict[str, CorpusSummary]:
    """Per-area tweet/user counts plus users active in several categories.

    Partitions sharing an area name are pooled; output is keyed by area
    name in sorted order.
    """
    pooled: dict[str, list] = {}
    for part in partitions:
        pooled.setdefault(part.area.name, []).extend(part.posts)
    out: dict[str, CorpusSummary] = {}
    for name in sorted(pooled):
        posts = pooled[name]
        labels_by_user: dict[str, set[str]] = {}
        for p in posts:
            labels_by_user.setdefault(p.user_id, set()).add(p.label)
        multi = sum(1 for labels in labels_by_user.values() if len(labels) >= 2)
        out[name] = CorpusSummary(tweets=len(posts), users=len(labels_by_user),
                                  multi_category_users=multi)
    return out
