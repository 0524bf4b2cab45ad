#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace soatest::xml {

/// Raised on any document the scanner cannot accept; the middleware maps it
/// to MalformedRequest or MalformedResponse depending on direction.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string name;  // as written, prefix kept ("soap:Body")
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<Node> children;
  std::string text;  // concatenated character data, entities decoded

  std::string_view local_name() const;
  const Node* child(std::string_view local) const;  // first child by local name
  const std::string* attr(std::string_view name) const;
};

/// Parses one element document. Accepts an XML declaration, comments, and
/// whitespace inside tags and between elements; rejects anything else.
/// Not a general XML parser — just enough for the harness grammars.
Node parse(std::string_view doc);

std::string escape_text(std::string_view raw);

}  // namespace soatest::xml
