//! Named example programs. Each comes with a default initial store.

use crate::cfg::{parse_cfg, parse_store, Cfg, Store};

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
    pub init: &'static str,
    /// Whether the default run terminates.
    pub terminates: bool,
}

impl Fixture {
    pub fn cfg(&self) -> Cfg {
        parse_cfg(self.source).unwrap_or_else(|e| panic!("fixture {}: {e}", self.name))
    }

    pub fn store(&self) -> Store {
        let cfg = self.cfg();
        Store::for_cfg(&cfg, parse_store(self.init).expect("fixture store")).expect("fixture store")
    }
}

pub const P_STRAIGHT: Fixture = Fixture {
    name: "P_STRAIGHT",
    summary: "three-node straight line",
    source: "\
node 1: x := 1
node 2: y := x + 1
node 3: ret y
edge 1 -> 2
edge 2 -> 3
",
    init: "x=0,y=0",
    terminates: true,
};

pub const P_INDEP: Fixture = Fixture {
    name: "P_INDEP",
    summary: "two independent assignments feeding one use",
    source: "\
node 1: x := 1
node 2: y := 2
node 3: z := x + y
node 4: ret z
edge 1 -> 2
edge 2 -> 3
edge 3 -> 4
",
    init: "x=0,y=0,z=0",
    terminates: true,
};

pub const P_DIAMOND: Fixture = Fixture {
    name: "P_DIAMOND",
    summary: "if/else joining at one use",
    source: "\
node 0: if c > 0
node 1: x := 1
node 2: x := 2
node 3: y := x
node 4: ret y
edge 0 -T-> 1
edge 0 -F-> 2
edge 1 -> 3
edge 2 -> 3
edge 3 -> 4
",
    init: "c=1,x=0,y=0",
    terminates: true,
};

pub const NESTED_IF: Fixture = Fixture {
    name: "NESTED_IF",
    summary: "conditional nested in one arm of another",
    source: "\
node 0: if a > 0
node 1: if b > 0
node 2: x := 1
node 3: x := 2
node 4: x := 3
node 5: ret x
edge 0 -T-> 1
edge 0 -F-> 4
edge 1 -T-> 2
edge 1 -F-> 3
edge 2 -> 5
edge 3 -> 5
edge 4 -> 5
",
    init: "a=1,b=-1,x=0",
    terminates: true,
};

pub const W: Fixture = Fixture {
    name: "W",
    summary: "do-while loop whose exit test is node 4",
    source: "\
node 1: i := 0
node 2: s := s + i
node 3: i := i + 1
node 4: if i < 3
node 5: ret s
edge 1 -> 2
edge 2 -> 3
edge 3 -> 4
edge 4 -T-> 2
edge 4 -F-> 5
",
    init: "i=0,s=0",
    terminates: true,
};

pub const F5: Fixture = Fixture {
    name: "F5",
    summary: "irreducible loop entered at 1 and at 4",
    source: "\
node 0: if n > 0
node 1: a := a + 1
node 2: n := n - 1
node 3: if n > 0
node 4: b := b + n
node 5: n := n - 1
node 6: if n > 0
node 7: ret b
edge 0 -T-> 1
edge 0 -F-> 4
edge 1 -> 2
edge 2 -> 3
edge 3 -T-> 4
edge 3 -F-> 7
edge 4 -> 5
edge 5 -> 6
edge 6 -T-> 1
edge 6 -F-> 7
",
    init: "a=0,b=0,n=3",
    terminates: true,
};

pub const F5_SHORT: Fixture = Fixture {
    name: "F5_SHORT",
    summary: "F5 entered through its false arm",
    init: "a=0,b=0,n=0",
    ..F5
};

pub const F5_LONG: Fixture = Fixture {
    name: "F5_LONG",
    summary: "F5 iterating several times",
    init: "a=2,b=1,n=6",
    ..F5
};

pub const F6: Fixture = Fixture {
    name: "F6",
    summary: "nested loops {1..5} and {2,3,4}",
    source: "\
node 0: i := 0
node 1: if i < 2
node 2: j := j + 1
node 3: x := x + j
node 4: if j < 2
node 5: i := i + 1
node 6: ret x
edge 0 -> 1
edge 1 -T-> 2
edge 1 -F-> 6
edge 2 -> 3
edge 3 -> 4
edge 4 -T-> 2
edge 4 -F-> 5
edge 5 -> 1
",
    init: "i=0,j=0,x=0",
    terminates: true,
};

pub const SUM3: Fixture = Fixture {
    name: "SUM3",
    summary: "while loop summing 1..3",
    source: "\
node 1: s := 0
node 2: i := 1
node 3: if i <= 3
node 4: s := s + i
node 5: i := i + 1
node 6: ret s
edge 1 -> 2
edge 2 -> 3
edge 3 -T-> 4
edge 3 -F-> 6
edge 4 -> 5
edge 5 -> 3
",
    init: "i=0,s=0",
    terminates: true,
};

pub const COUNTDOWN: Fixture = Fixture {
    name: "COUNTDOWN",
    summary: "while loop counting n down to zero",
    source: "\
node 0: n := n + 2
node 1: if n > 0
node 2: n := n - 1
node 3: ret n
edge 0 -> 1
edge 1 -T-> 2
edge 1 -F-> 3
edge 2 -> 1
",
    init: "n=1",
    terminates: true,
};

pub const DEFORD: Fixture = Fixture {
    name: "DEFORD",
    summary: "a definition conditionally overwritten before its use",
    source: "\
node 1: x := 1
node 2: if c > 0
node 3: x := 2
node 4: y := x
node 5: ret y
edge 1 -> 2
edge 2 -T-> 3
edge 2 -F-> 4
edge 3 -> 4
edge 4 -> 5
",
    init: "c=1,x=0,y=0",
    terminates: true,
};

pub const DEFORD_LOOP: Fixture = Fixture {
    name: "DEFORD_LOOP",
    summary: "two definitions in one loop, each reaching the other only around it",
    source: "\
node 0: k := 2
node 1: if c > 0
node 2: x := 1
node 3: x := 2
node 4: y := x
node 5: k := k - 1
node 6: if k > 0
node 7: ret y
edge 0 -> 1
edge 1 -T-> 2
edge 1 -F-> 3
edge 2 -> 4
edge 3 -> 4
edge 4 -> 5
edge 5 -> 6
edge 6 -T-> 1
edge 6 -F-> 7
",
    init: "c=0,k=0,x=0,y=0",
    terminates: true,
};

pub const MIDTEST: Fixture = Fixture {
    name: "MIDTEST",
    summary: "loop whose exit test sits between two body statements",
    source: "\
node 1: i := 0
node 2: s := s + i
node 3: if i < 3
node 4: i := i + 1
node 6: ret s
edge 1 -> 2
edge 2 -> 3
edge 3 -T-> 4
edge 3 -F-> 6
edge 4 -> 2
",
    init: "i=0,s=0",
    terminates: true,
};

pub const ARM_REENTRY: Fixture = Fixture {
    name: "ARM_REENTRY",
    summary: "a back edge from an if re-entering one arm of a conditional",
    source: "\
node 1: if c > 0
node 2: x := x + 1
node 3: x := x + 2
node 4: if x < 5
node 5: ret x
edge 1 -T-> 2
edge 1 -F-> 3
edge 2 -> 4
edge 3 -> 4
edge 4 -T-> 3
edge 4 -F-> 5
",
    init: "c=1,x=0",
    terminates: true,
};

pub const STUCKL: Fixture = Fixture {
    name: "STUCKL",
    summary: "loop whose carried dependences run against the first iteration",
    source: "\
node 1: if a > 0
node 2: x := y + 1
node 3: y := x + 1
node 4: if y < 6
node 5: ret y
edge 1 -T-> 2
edge 1 -F-> 3
edge 2 -> 3
edge 3 -> 4
edge 4 -T-> 2
edge 4 -F-> 5
",
    init: "a=1,x=0,y=0",
    terminates: true,
};

pub const FOREVER: Fixture = Fixture {
    name: "FOREVER",
    summary: "a loop that never exits",
    source: "\
node 0: x := x
node 1: if T
node 2: ret x
edge 0 -> 1
edge 1 -T-> 1
edge 1 -F-> 2
",
    init: "x=0",
    terminates: false,
};

pub const ALL: &[Fixture] = &[
    P_STRAIGHT,
    P_INDEP,
    P_DIAMOND,
    NESTED_IF,
    W,
    F5,
    F5_SHORT,
    F5_LONG,
    F6,
    SUM3,
    COUNTDOWN,
    DEFORD,
    DEFORD_LOOP,
    MIDTEST,
    ARM_REENTRY,
    STUCKL,
    FOREVER,
];

pub fn fixture(name: &str) -> Option<Fixture> {
    ALL.iter()
        .copied()
        .find(|f| f.name.eq_ignore_ascii_case(name))
}
