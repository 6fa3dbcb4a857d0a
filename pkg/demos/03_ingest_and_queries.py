"""
Collection queries, record parsing, and corpus summaries
========================================================

Shows the area query builder, resilient JSONL parsing, event-window
partitioning, and the per-area corpus summary.
"""

import datetime as dt

import discoursefrag as df

la = df.AreaSpec("Los Angeles",
                 ("Los Angeles County", "Orange County", "Long Beach"),
                 country="US", language="en")
print("collection query:")
print(" ", df.build_query(la))

raw = b"""\
{"id":"1","user_id":"u1","created_at":1623326400,"text":"so much xenophobia here","area":"Los Angeles","mentions":["u2","u1"]}
{"id":"2","user_id":"u2","created_at":1623326500,"text":"pure racism in this thread","area":"Los Angeles","reply_to_user":"u1"}
{"id":"3","user_id":"u2","created_at":1623326600,"text":"blatant sexism too","area":"Los Angeles"}
{"id":"2","user_id":"u3","created_at":1623326700,"text":"duplicate id","area":"Los Angeles"}
not json
{"id":"5","created_at":1623326800,"text":"missing author","area":"Los Angeles"}
"""
posts, report = df.parse_records(raw, "jsonl")
print(f"\nparsed {report.parsed}, skipped {report.skipped}: {dict(report.reasons)}")
print("self-mention removed:", posts[0].mentions)

# label and slice into an event window
clf = df.default_classifier()
labeled, label_report = df.label_posts(posts, clf)
print(f"labeled {label_report.labeled}, dropped {label_report.dropped}")
window = df.EventWindow("demo event", dt.date(2021, 6, 10), 1, 1)
part = df.partition(labeled, la, window)
print(f"\npartition holds {len(part.posts)} labeled posts "
      f"across days {sorted(d.isoformat() for d in part.day_index)}")

summary = df.summarize_corpus([part])
for area, s in summary.items():
    print(f"{area}: tweets={s.tweets} users={s.users} "
          f"multi-category users={s.multi_category_users}")
