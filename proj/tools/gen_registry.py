#!/usr/bin/env python3
"""Regenerate include/isoflow/registry.hpp from scenarios/*.cfg."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
ORDER = [
    "existence-uniqueness",
    "isothermalization",
    "flux-decay",
    "quadratic-growth",
    "unbounded-isothermalization",
    "infinite-isothermalization",
    "open-problem-explore",
]

HEAD = '''#pragma once

#include <string>
#include <vector>

#include "isoflow/scenario.hpp"

namespace isoflow {

struct RegistryEntry {
  std::string name;
  std::string text;
};

/// Built-in scenarios; the same texts ship as scenarios/<name>.cfg.
inline const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries{
'''

TAIL = '''  };
  return entries;
}

inline const RegistryEntry* find_registered(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

inline Scenario registered_scenario(const std::string& name) {
  const RegistryEntry* e = find_registered(name);
  if (!e) throw ConfigError("no built-in scenario named '" + name + "'");
  return parse_scenario_text(e->text);
}

}  // namespace isoflow
'''


def main():
    names = sorted(p.stem for p in (ROOT / "scenarios").glob("*.cfg"))
    ordered = [n for n in ORDER if n in names] + [n for n in names if n not in ORDER]
    body = "".join(
        '      {"%s", R"cfg(%s)cfg"},\n' % (n, (ROOT / "scenarios" / (n + ".cfg")).read_text()) for n in ordered
    )
    (ROOT / "include/isoflow/registry.hpp").write_text(HEAD + body + TAIL)


if __name__ == "__main__":
    main()
