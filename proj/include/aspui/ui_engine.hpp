#pragma once

#include <aspui/solver_bridge.hpp>
#include <aspui/term.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aspui {

/// The ten widget types understood by the frontend.
std::span<std::string_view const> widget_types();

struct UIAttribute {
    Term key;
    Term value;

    friend bool operator==(UIAttribute const &, UIAttribute const &) = default;
};

struct UIHandler {
    Term event;
    /// call, update or context
    std::string action;
    Term operand;

    friend bool operator==(UIHandler const &, UIHandler const &) = default;
};

/// A widget and its subtree. The tree returned by `assemble_tree` is rooted at
/// the synthetic node with id `root` and type `root`.
struct UINode {
    Term id;
    std::string type;
    std::vector<UIAttribute> attributes;
    std::vector<UIHandler> when;
    std::vector<UINode> children;

    friend bool operator==(UINode const &, UINode const &) = default;
};

/// Solves the UI encoding together with the domain-state facts and returns
/// the `elem/3`, `attr/3` and `when/4` atoms of its first stable model.
/// Throws NoUIModel when there is none and GroundingError for solver errors
/// or unregistered `@` functions.
AtomSet build_ui_atoms(ProgramBundle const &ui_files, std::string const &snapshot_facts, SolverBridge const &bridge);

/// The built-in `@concat`: the unquoted renderings of `args`, joined.
Term evaluate_external_concat(std::span<Term const> args);

/// Builds and validates the widget tree. Throws CycleError, DuplicateId,
/// UnknownWidgetType or TreeError; attributes and handlers of unknown
/// elements, and elements under a missing parent, are dropped with a warning.
UINode assemble_tree(AtomSet const &atoms);

/// Compact JSON, keys in the order id, type, attributes, when, children.
std::string serialize_tree(UINode const &tree);

/// Inverse of `serialize_tree`; throws ProtocolError on schema violations.
UINode parse_tree(std::string_view json);

} // namespace aspui
