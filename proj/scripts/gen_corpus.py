#!/usr/bin/env python3
"""Generate small student-style C programs for tests and demos.

Every program defines at least one function that it calls, declares local
variables, and most use a struct or typedef, so every corruption category has
sites to work on.
"""

import argparse
import pathlib
import random
import subprocess
import sys

VAR_NAMES = ["a", "b", "c", "n", "m", "k", "x", "y", "z", "t", "sum", "total", "count",
             "acc", "res", "val", "num", "tmp", "lo", "hi", "mid", "step", "cur", "prev",
             "best", "limit", "size", "len", "idx", "pos"]
FUNC_NAMES = ["compute", "solve", "helper", "calc", "process", "update", "check", "apply",
              "combine", "reduce", "measure", "scan", "walk", "fold", "blend"]
TYPE_NAMES = ["Point", "Pair", "Item", "Node", "Box", "Cell", "Entry", "Rect", "Vec", "Span"]
FIELD_NAMES = ["x", "y", "w", "h", "key", "value", "left", "right", "lo", "hi"]


def pick(rng, pool, k):
    return rng.sample(pool, k)


def t_sum(rng):
    n, i, s = pick(rng, VAR_NAMES, 3)
    f = rng.choice(FUNC_NAMES)
    lim = rng.randint(5, 40)
    op = rng.choice(["+", "*", "-"])
    return f"""#include <stdio.h>
int {f}(int {n})
{{
    int {s} = 0;
    int {i};
    for ({i} = 0; {i} < {n}; {i}++) {{
        {s} = {s} {op} {i};
    }}
    return {s};
}}
int main(void)
{{
    int {n} = {lim};
    int {i} = {f}({n});
    printf("%d\\n", {i});
    return 0;
}}
"""


def t_struct(rng):
    ty = rng.choice(TYPE_NAMES)
    fa, fb = pick(rng, FIELD_NAMES, 2)
    p, q, d = pick(rng, VAR_NAMES, 3)
    f = rng.choice(FUNC_NAMES)
    va, vb, vc, vd = (rng.randint(0, 20) for _ in range(4))
    return f"""#include <stdio.h>
struct {ty} {{
    int {fa};
    int {fb};
}};
int {f}(struct {ty} {p}, struct {ty} {q})
{{
    int {d} = {p}.{fa} - {q}.{fa};
    {d} = {d} + {p}.{fb} - {q}.{fb};
    return {d};
}}
int main(void)
{{
    struct {ty} {p};
    struct {ty} {q};
    {p}.{fa} = {va};
    {p}.{fb} = {vb};
    {q}.{fa} = {vc};
    {q}.{fb} = {vd};
    printf("%d\\n", {f}({p}, {q}));
    return 0;
}}
"""


def t_typedef(rng):
    ty = rng.choice(TYPE_NAMES)
    fa, fb = pick(rng, FIELD_NAMES, 2)
    r, s, area = pick(rng, VAR_NAMES, 3)
    f, g = pick(rng, FUNC_NAMES, 2)
    return f"""#include <stdio.h>
typedef struct {{
    double {fa};
    double {fb};
}} {ty};
double {f}({ty} {r})
{{
    double {area} = {r}.{fa} * {r}.{fb};
    return {area};
}}
void {g}({ty} *{r}, double {s})
{{
    {r}->{fa} = {r}->{fa} * {s};
    {r}->{fb} = {r}->{fb} * {s};
}}
int main(void)
{{
    {ty} {r};
    double {s} = {rng.randint(2, 9)}.5;
    {r}.{fa} = {rng.randint(1, 30)}.0;
    {r}.{fb} = {rng.randint(1, 30)}.0;
    {g}(&{r}, {s});
    printf("%f\\n", {f}({r}));
    return 0;
}}
"""


def t_array_max(rng):
    arr, n, i, best = pick(rng, VAR_NAMES, 4)
    f = rng.choice(FUNC_NAMES)
    size = rng.randint(4, 8)
    vals = ", ".join(str(rng.randint(-50, 50)) for _ in range(size))
    cmp = rng.choice([">", "<"])
    return f"""#include <stdio.h>
int {f}(int {arr}[], int {n})
{{
    int {best} = {arr}[0];
    int {i};
    for ({i} = 1; {i} < {n}; {i}++) {{
        if ({arr}[{i}] {cmp} {best}) {{
            {best} = {arr}[{i}];
        }}
    }}
    return {best};
}}
int main(void)
{{
    int {arr}[{size}] = {{{vals}}};
    int {n} = {size};
    printf("%d\\n", {f}({arr}, {n}));
    return 0;
}}
"""


def t_factorial(rng):
    n, r = pick(rng, VAR_NAMES, 2)
    f = rng.choice(FUNC_NAMES)
    return f"""#include <stdio.h>
long {f}(int {n})
{{
    if ({n} <= 1) {{
        return 1;
    }}
    return {n} * {f}({n} - 1);
}}
int main(void)
{{
    int {n} = {rng.randint(3, 12)};
    long {r} = {f}({n});
    printf("%ld\\n", {r});
    return 0;
}}
"""


def t_swap(rng):
    a, b, t = pick(rng, VAR_NAMES, 3)
    f = rng.choice(FUNC_NAMES)
    return f"""#include <stdio.h>
void {f}(int *{a}, int *{b})
{{
    int {t} = *{a};
    *{a} = *{b};
    *{b} = {t};
}}
int main(void)
{{
    int {a} = {rng.randint(0, 99)};
    int {b} = {rng.randint(0, 99)};
    {f}(&{a}, &{b});
    printf("%d %d\\n", {a}, {b});
    return 0;
}}
"""


def t_strlen(rng):
    s, n, i = pick(rng, VAR_NAMES, 3)
    f = rng.choice(FUNC_NAMES)
    word = rng.choice(["hello", "world", "student", "compiler", "repair", "token"])
    return f"""#include <stdio.h>
int {f}(const char *{s})
{{
    int {n} = 0;
    while ({s}[{n}] != '\\0') {{
        {n}++;
    }}
    return {n};
}}
int main(void)
{{
    char {s}[32] = "{word}";
    int {i} = {f}({s});
    printf("%d\\n", {i});
    return 0;
}}
"""


def t_gcd(rng):
    a, b, t, g = pick(rng, VAR_NAMES, 4)
    f, h = pick(rng, FUNC_NAMES, 2)
    return f"""#include <stdio.h>
int {f}(int {a}, int {b})
{{
    while ({b} != 0) {{
        int {t} = {b};
        {b} = {a} % {b};
        {a} = {t};
    }}
    return {a};
}}
int {h}(int {a}, int {b})
{{
    int {g} = {f}({a}, {b});
    return {a} / {g} * {b};
}}
int main(void)
{{
    int {a} = {rng.randint(10, 200)};
    int {b} = {rng.randint(10, 200)};
    printf("%d %d\\n", {f}({a}, {b}), {h}({a}, {b}));
    return 0;
}}
"""


def t_enum(rng):
    ty = rng.choice(TYPE_NAMES)
    c, v, r = pick(rng, VAR_NAMES, 3)
    f = rng.choice(FUNC_NAMES)
    return f"""#include <stdio.h>
enum {ty} {{ LOW, MID, HIGH }};
enum {ty} {f}(int {v})
{{
    enum {ty} {c} = LOW;
    if ({v} > {rng.randint(50, 70)}) {{
        {c} = HIGH;
    }} else if ({v} > {rng.randint(10, 40)}) {{
        {c} = MID;
    }}
    return {c};
}}
int main(void)
{{
    int {v} = {rng.randint(0, 100)};
    enum {ty} {r} = {f}({v});
    printf("%d\\n", (int){r});
    return 0;
}}
"""


def t_average(rng):
    arr, n, i, s, avg = pick(rng, VAR_NAMES, 5)
    f = rng.choice(FUNC_NAMES)
    size = rng.randint(3, 7)
    vals = ", ".join(f"{rng.randint(0, 99)}.{rng.randint(0, 9)}" for _ in range(size))
    return f"""#include <stdio.h>
double {f}(double {arr}[], int {n})
{{
    double {s} = 0.0;
    int {i};
    for ({i} = 0; {i} < {n}; {i}++)
        {s} += {arr}[{i}];
    return {s} / {n};
}}
int main(void)
{{
    double {arr}[{size}] = {{{vals}}};
    double {avg};
    {avg} = {f}({arr}, {size});
    printf("%.2f\\n", {avg});
    return 0;
}}
"""


def t_linked(rng):
    ty = rng.choice(TYPE_NAMES)
    fv, fn = rng.choice(["value", "key"]), "next"
    p, q, s, cur = pick(rng, VAR_NAMES, 4)
    f = rng.choice(FUNC_NAMES)
    return f"""#include <stdio.h>
struct {ty} {{
    int {fv};
    struct {ty} *{fn};
}};
int {f}(struct {ty} *{cur})
{{
    int {s} = 0;
    while ({cur} != NULL) {{
        {s} = {s} + {cur}->{fv};
        {cur} = {cur}->{fn};
    }}
    return {s};
}}
int main(void)
{{
    struct {ty} {p};
    struct {ty} {q};
    {p}.{fv} = {rng.randint(1, 50)};
    {p}.{fn} = &{q};
    {q}.{fv} = {rng.randint(1, 50)};
    {q}.{fn} = NULL;
    printf("%d\\n", {f}(&{p}));
    return 0;
}}
"""


def t_count(rng):
    n, i, c, d = pick(rng, VAR_NAMES, 4)
    f = rng.choice(FUNC_NAMES)
    mod = rng.randint(2, 7)
    return f"""#include <stdio.h>
int {f}(int {n}, int {d})
{{
    int {c} = 0;
    int {i} = 1;
    while ({i} <= {n}) {{
        if ({i} % {d} == 0)
            {c}++;
        {i}++;
    }}
    return {c};
}}
int main(void)
{{
    int {n} = {rng.randint(20, 500)};
    int {d} = {mod};
    int {c} = {f}({n}, {d});
    printf("%d\\n", {c});
    return 0;
}}
"""


TEMPLATES = [t_sum, t_struct, t_typedef, t_array_max, t_factorial, t_swap, t_strlen,
             t_gcd, t_enum, t_average, t_linked, t_count]


def compiles(path, cc):
    r = subprocess.run([cc, "-fsyntax-only", "-std=c99", "-w", str(path)],
                       capture_output=True, text=True)
    return r.returncode == 0, r.stderr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--count", type=int, default=160)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--cc", default="gcc")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seen = set()
    written = 0
    while written < args.count:
        template = TEMPLATES[written % len(TEMPLATES)]
        src = template(rng)
        if src in seen:
            continue
        path = out / f"prog_{written:03d}.c"
        path.write_text(src)
        ok, err = compiles(path, args.cc)
        if not ok:
            sys.exit(f"{path} does not compile:\n{err}")
        seen.add(src)
        written += 1
    print(f"wrote {written} programs to {out}")


if __name__ == "__main__":
    main()
