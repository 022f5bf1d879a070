// SPDX-License-Identifier: Apache-2.0

use troubleshooter::{elastic_firewall_tsg, parse_tsg, TsgError, TsgNode};

#[test]
fn the_stock_procedure_parses_with_its_full_shape() {
    let tsg = parse_tsg(elastic_firewall_tsg()).expect("stock text parses");
    assert_eq!(tsg.entry, "overload");
    assert_eq!(tsg.nodes.len(), 9);
    assert_eq!(tsg.edges.len(), 8);

    let tools: Vec<&str> = ["overload", "fleet", "cachelnk", "cpus", "webprobe"]
        .iter()
        .map(|id| match tsg.node(id).unwrap() {
            TsgNode::Tool { name, .. } => name.as_str(),
            other => panic!("{id} should be a tool, is {other:?}"),
        })
        .collect();
    assert_eq!(tools, ["traffic_gen", "vnf_count", "link_load", "cpu_load", "ping_path"]);

    match tsg.node("verdict").unwrap() {
        TsgNode::Decision { branches } => {
            let labels: Vec<&str> = branches.iter().map(|(l, _)| l.as_str()).collect();
            assert_eq!(labels, ["imbalanced", "congested", "healthy"]);
        }
        other => panic!("verdict should be a decision, is {other:?}"),
    }
    match tsg.node("s_lb").unwrap() {
        TsgNode::Sink { verdict } => assert_eq!(verdict, "debug LoadBalancer"),
        other => panic!("s_lb should be a sink, is {other:?}"),
    }
}

#[test]
fn a_single_tool_to_sink_graph_is_the_minimal_valid_form() {
    let tsg = parse_tsg(
        "node probe = tool vnf_count(ACL_FW)\n\
         node done = sink \"ok\"\n\
         edge probe -> done\n",
    )
    .expect("minimal graph parses");
    assert_eq!(tsg.entry, "probe");
    assert_eq!(tsg.out_edges("probe").len(), 1);
}

#[test]
fn an_edge_back_to_an_ancestor_is_a_cycle_error() {
    let err = parse_tsg(
        "node a = tool vnf_count(ACL_FW)\n\
         node b = tool vnf_count(NAT)\n\
         node done = sink \"ok\"\n\
         edge a -> b\n\
         edge b -> a\n",
    )
    .unwrap_err();
    assert!(matches!(err, TsgError::Cycle { .. }), "{err:?}");
}

#[test]
fn decision_out_edges_must_carry_labels() {
    let err = parse_tsg(
        "node d = decision {hot: 1 > 0, cold: else}\n\
         node a = sink \"A\"\n\
         node b = sink \"B\"\n\
         edge d -> a\n\
         edge d:cold -> b\n",
    )
    .unwrap_err();
    assert_eq!(err, TsgError::UnlabeledBranch { node: "d".into() });
}

#[test]
fn syntax_errors_carry_their_line_number() {
    let cases = [
        ("node one = tool probe(\nnode x = sink \"y\"", 1),
        ("node ok = sink \"fine\"\nnode ok = sink \"again\"", 2),
        ("node a = sink \"ok\"\nnode d = decision {1bad: else}", 2),
        ("node a = sink 'ok'", 1),
        ("nodes a = sink \"ok\"", 1),
        ("node d = decision {broken: 1 +, ok: else}", 1),
    ];
    for (text, want_line) in cases {
        match parse_tsg(text) {
            Err(TsgError::Parse { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
            other => panic!("{text:?}: expected a parse error, got {other:?}"),
        }
    }
}

#[test]
fn structural_problems_are_rejected() {
    let structure = |text: &str, needle: &str| match parse_tsg(text) {
        Err(TsgError::Structure(msg)) => {
            assert!(msg.contains(needle), "{msg:?} lacks {needle:?}")
        }
        other => panic!("expected structure error with {needle:?}, got {other:?}"),
    };
    structure("node a = tool vnf_count(X)\nedge a -> ghost\n", "unknown node");
    structure(
        "node a = tool vnf_count(X)\nnode s = sink \"ok\"\nnode t = sink \"no\"\nedge a -> s\nedge a -> t\n",
        "exactly one out-edge",
    );
    structure("node s = sink \"ok\"\nnode t = sink \"no\"\nedge s -> t\n", "terminal");
    structure(
        "node d = decision {hot: 1 > 0, cold: else}\nnode a = sink \"A\"\nedge d:hot -> a\n",
        "no out-edge",
    );
    structure(
        "node d = decision {hot: 1 > 0}\nnode a = sink \"A\"\nnode b = sink \"B\"\nedge d:hot -> a\nedge d:warm -> b\n",
        "no branch",
    );
    structure("", "no nodes");
}

#[test]
fn comments_and_blank_lines_are_ignored_even_with_hash_in_verdicts() {
    let tsg = parse_tsg(
        "# a comment line\n\
         \n\
         node a = tool vnf_count(ACL_FW) # trailing comment\n\
         node s = sink \"issue #42 confirmed\"\n\
         edge a -> s\n",
    )
    .expect("parses");
    match tsg.node("s").unwrap() {
        TsgNode::Sink { verdict } => assert_eq!(verdict, "issue #42 confirmed"),
        other => panic!("unexpected {other:?}"),
    }
}
