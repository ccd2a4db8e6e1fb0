#!/usr/bin/env python3
"""Writes tests/data/sql_corpus.json: hand-picked queries plus seeded random
compositions over the fixture schemas."""

import json
import random
import sys

HAND = {
    "pets_1": [
        "SELECT count(*) FROM Student",
        "SELECT DISTINCT Major FROM Student",
        "SELECT Fname, LName FROM Student WHERE Age > 20",
        "SELECT count(DISTINCT PetType) FROM Pets",
        "SELECT max(weight), PetType FROM Pets GROUP BY PetType",
        "SELECT avg(pet_age), max(pet_age), PetType FROM Pets GROUP BY PetType",
        "SELECT PetType, avg(weight) FROM Pets GROUP BY PetType HAVING count(*) > 1",
        "SELECT Major, count(*) FROM Student GROUP BY Major ORDER BY count(*) DESC LIMIT 1",
        "SELECT Fname FROM Student WHERE Sex = 'F' AND Age < 22",
        "SELECT Fname FROM Student WHERE Major = 600 OR Advisor = 1121",
        "SELECT T1.Fname FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID",
        "SELECT count(*) FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID WHERE T1.Sex = 'F'",
        "SELECT T1.Fname, T1.Age FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID "
        "JOIN Pets AS T3 ON T3.PetID = T2.PetID WHERE T3.PetType = 'dog'",
        "SELECT Fname FROM Student WHERE StuID NOT IN (SELECT StuID FROM Has_Pet)",
        "SELECT Fname FROM Student WHERE StuID IN (SELECT StuID FROM Has_Pet)",
        "SELECT PetID FROM Pets WHERE weight > (SELECT avg(weight) FROM Pets)",
        "SELECT Major FROM Student EXCEPT SELECT Major FROM Student WHERE Sex = 'M'",
        "SELECT Fname FROM Student WHERE Age > 20 INTERSECT SELECT Fname FROM Student WHERE Sex = 'F'",
        "SELECT Fname FROM Student WHERE Major = 600 UNION SELECT Fname FROM Student WHERE Age < 19",
        "SELECT LName FROM Student WHERE Fname LIKE '%a%'",
        "SELECT LName FROM Student WHERE Fname NOT LIKE 'J%'",
        "SELECT Fname FROM Student WHERE Age BETWEEN 18 AND 21",
        "SELECT Fname FROM Student ORDER BY Age",
        "SELECT Fname FROM Student ORDER BY Age ASC LIMIT 3",
        "SELECT max(Age) - min(Age) FROM Student",
        "SELECT weight / pet_age FROM Pets",
        "SELECT sum(weight) FROM Pets WHERE PetType = 'cat'",
        "SELECT min(weight) FROM Pets WHERE pet_age != 3",
        "SELECT count(*), T1.StuID FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID GROUP BY T1.StuID",
        "SELECT T1.Fname FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID GROUP BY T1.StuID "
        "HAVING count(*) >= 2",
        "SELECT Fname FROM Student WHERE Age = (SELECT max(Age) FROM Student)",
        "SELECT PetType FROM Pets WHERE weight >= 10 AND pet_age <= 5 OR PetType = 'bird'",
        "SELECT Major FROM Student GROUP BY Major HAVING avg(Age) > 19 AND count(*) > 2",
        "SELECT DISTINCT T1.Fname FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID "
        "JOIN Pets AS T3 ON T3.PetID = T2.PetID WHERE T3.PetType = 'cat' INTERSECT SELECT DISTINCT T1.Fname "
        "FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.StuID = T2.StuID JOIN Pets AS T3 ON T3.PetID = T2.PetID "
        "WHERE T3.PetType = 'dog'",
        "SELECT StuID FROM Student EXCEPT SELECT T1.StuID FROM Student AS T1 JOIN Has_Pet AS T2 "
        "ON T1.StuID = T2.StuID",
        "SELECT Fname FROM Student WHERE StuID IN (SELECT StuID FROM Has_Pet WHERE PetID IN "
        "(SELECT PetID FROM Pets WHERE weight > 5))",
        "SELECT avg(Age) FROM Student WHERE StuID NOT IN (SELECT StuID FROM Has_Pet)",
        "SELECT Fname, Age FROM Student WHERE Age > 19 ORDER BY Fname DESC",
        "SELECT count(*) FROM Pets WHERE weight > 10",
        "SELECT PetType, max(weight) FROM Pets GROUP BY PetType ORDER BY max(weight) DESC",
    ],
    "campus": [
        "SELECT title FROM course",
        "SELECT title, credits FROM course WHERE department = 'math'",
        "SELECT department, count(*) FROM course GROUP BY department",
        "SELECT department FROM course GROUP BY department HAVING sum(credits) > 10",
        "SELECT T1.surname FROM instructor AS T1 JOIN course AS T2 ON T1.cno = T2.cno WHERE T2.credits > 3",
        "SELECT surname FROM instructor ORDER BY salary DESC LIMIT 5",
        "SELECT avg(salary) FROM instructor WHERE cno IN (SELECT cno FROM course WHERE department = 'art')",
        "SELECT city FROM building WHERE floors > 3 UNION SELECT city FROM building WHERE floors < 2",
        "SELECT count(DISTINCT city) FROM building",
        "SELECT title FROM course WHERE credits BETWEEN 2 AND 4 AND department != 'law'",
        "SELECT surname FROM instructor WHERE salary > (SELECT avg(salary) FROM instructor)",
        "SELECT max(floors), min(floors), avg(floors) FROM building",
        "SELECT T2.title, T1.salary FROM instructor AS T1 JOIN course AS T2 ON T2.cno = T1.cno ORDER BY T1.salary",
        "SELECT title FROM course EXCEPT SELECT T2.title FROM instructor AS T1 JOIN course AS T2 ON T1.cno = T2.cno",
        "SELECT department FROM course WHERE title LIKE '%intro%' OR credits = 1",
    ],
    "clinic": [
        "SELECT phone FROM owner WHERE city = 'Paris'",
        "SELECT count(*) FROM dog WHERE breed = 'poodle'",
        "SELECT breed, avg(weight) FROM dog GROUP BY breed",
        "SELECT T1.phone FROM owner AS T1 JOIN dog AS T2 ON T1.owner_code = T2.owner_code WHERE T2.weight > 20",
        "SELECT city, count(*) FROM owner GROUP BY city ORDER BY count(*) DESC LIMIT 1",
        "SELECT breed FROM dog WHERE owner_code IN (SELECT owner_code FROM owner WHERE city = 'Lyon')",
        "SELECT breed FROM dog INTERSECT SELECT breed FROM dog WHERE weight < 5",
        "SELECT phone FROM owner WHERE owner_code NOT IN (SELECT owner_code FROM dog)",
    ],
}

# Column pools per table: (original table, numeric columns, text columns).
TABLES = {
    "pets_1": [
        ("Student", ["Age", "Major", "Advisor", "StuID"], ["Fname", "LName", "Sex", "city_code"]),
        ("Pets", ["weight", "pet_age", "PetID"], ["PetType"]),
    ],
    "campus": [
        ("course", ["credits", "cno"], ["title", "department"]),
        ("instructor", ["salary", "sno", "cno"], ["surname"]),
        ("building", ["floors"], ["city", "building_code"]),
    ],
    "clinic": [
        ("owner", ["owner_code"], ["phone", "city"]),
        ("dog", ["weight", "dog_code", "owner_code"], ["breed"]),
    ],
}

AGGS = ["max", "min", "avg", "sum"]
WORDS = ["alpha", "beta", "gamma", "delta", "x%", "%y"]


def condition(rng, num, txt):
    if num and (not txt or rng.random() < 0.6):
        col = rng.choice(num)
        op = rng.choice(["=", ">", "<", ">=", "<=", "!=", "BETWEEN"])
        if op == "BETWEEN":
            return f"{col} BETWEEN {rng.randint(0, 5)} AND {rng.randint(6, 20)}"
        return f"{col} {op} {rng.randint(0, 100)}"
    col = rng.choice(txt)
    op = rng.choice(["=", "!=", "LIKE", "NOT LIKE"])
    return f"{col} {op} '{rng.choice(WORDS)}'"


def where(rng, num, txt):
    n = rng.randint(1, 3)
    out = condition(rng, num, txt)
    for _ in range(n - 1):
        out += f" {rng.choice(['AND', 'OR'])} {condition(rng, num, txt)}"
    return out


def compose(rng, db):
    table, num, txt = rng.choice(TABLES[db])
    parts = []
    grouped = None
    kind = rng.random()
    if kind < 0.3:
        grouped = rng.choice(txt)
        sel = [grouped, rng.choice(["count(*)", f"{rng.choice(AGGS)}({rng.choice(num)})"])]
    elif kind < 0.5:
        sel = [f"{rng.choice(AGGS)}({c})" for c in rng.sample(num, min(len(num), rng.randint(1, 2)))]
    elif kind < 0.6:
        sel = [f"count(DISTINCT {rng.choice(txt)})"]
    else:
        sel = rng.sample(num + txt, rng.randint(1, 3))
    distinct = "DISTINCT " if grouped is None and kind >= 0.6 and rng.random() < 0.2 else ""
    parts.append(f"SELECT {distinct}{', '.join(sel)} FROM {table}")
    if rng.random() < 0.6:
        parts.append("WHERE " + where(rng, num, txt))
    if grouped:
        parts.append(f"GROUP BY {grouped}")
        if rng.random() < 0.5:
            parts.append(f"HAVING count(*) {rng.choice(['>', '<', '>='])} {rng.randint(1, 5)}")
    if rng.random() < 0.3 and not (kind >= 0.3 and kind < 0.6):
        key = rng.choice(num)
        parts.append(f"ORDER BY {key} {rng.choice(['ASC', 'DESC'])}")
        if rng.random() < 0.5:
            parts.append(f"LIMIT {rng.randint(1, 10)}")
    sql = " ".join(parts)
    r = rng.random()
    if r < 0.1 and grouped is None and kind >= 0.6:
        other = ", ".join(sel)
        op = rng.choice(["UNION", "INTERSECT", "EXCEPT"])
        sql += f" {op} SELECT {other} FROM {table} WHERE {condition(rng, num, txt)}"
    elif r < 0.2 and num:
        col = rng.choice(num)
        agg = rng.choice(AGGS)
        sql = f"SELECT {', '.join(sel) if grouped is None else sel[0]} FROM {table} WHERE {col} > " \
              f"(SELECT {agg}({col}) FROM {table})"
        if grouped:
            sql += f" GROUP BY {grouped}"
    return sql


def main():
    rng = random.Random(20220514)
    rows = []
    for db, queries in HAND.items():
        rows += [{"db_id": db, "query": q} for q in queries]
    seen = {r["query"] for r in rows}
    dbs = sorted(TABLES)
    while len(rows) < 260:
        db = rng.choice(dbs)
        q = compose(rng, db)
        if q not in seen:
            seen.add(q)
            rows.append({"db_id": db, "query": q})
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/sql_corpus.json"
    with open(out, "w") as f:
        json.dump(rows, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
