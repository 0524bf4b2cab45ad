#include "soatest/xml.hpp"

#include <cctype>
#include <charconv>

namespace soatest::xml {

namespace {

constexpr int kMaxDepth = 64;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

class Scanner {
 public:
  explicit Scanner(std::string_view doc) : s_(doc) {}

  Node parse_document() {
    skip_prolog();
    Node root = parse_element(0);
    skip_misc();
    if (pos_ != s_.size()) fail("trailing content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(why + " (offset " + std::to_string(pos_) + ")");
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() {
    if (eof()) fail("unexpected end of document");
    return s_[pos_++];
  }

  void skip_ws() {
    while (!eof() && is_space(peek())) ++pos_;
  }

  bool starts_with(std::string_view what) const { return s_.substr(pos_).starts_with(what); }

  void skip_comment() {
    pos_ += 4;  // "<!--"
    auto end = s_.find("-->", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    pos_ = end + 3;
  }

  void skip_prolog() {
    skip_ws();
    if (starts_with("<?xml")) {
      auto end = s_.find("?>", pos_);
      if (end == std::string_view::npos) fail("unterminated XML declaration");
      pos_ = end + 2;
    }
    skip_misc();
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        skip_comment();
        continue;
      }
      return;
    }
  }

  std::string parse_name() {
    if (eof() || !is_name_start(peek())) fail("expected a name");
    std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string decode_entity() {
    // called with pos_ on '&'
    auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity");
    std::string_view ent = s_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (ent == "amp") return "&";
    if (ent == "lt") return "<";
    if (ent == "gt") return ">";
    if (ent == "quot") return "\"";
    if (ent == "apos") return "'";
    if (!ent.empty() && ent[0] == '#') {
      std::string_view digits = ent.substr(1);
      int base = 10;
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        digits = digits.substr(1);
        base = 16;
      }
      unsigned int cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
      if (ec != std::errc{} || p != digits.data() + digits.size() || cp == 0 || cp > 0x10FFFF)
        fail("bad character reference");
      // encode UTF-8
      std::string out;
      if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
      } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      }
      return out;
    }
    fail("unknown entity '&" + std::string(ent) + ";'");
  }

  std::string parse_attr_value() {
    char quote = take();
    if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated attribute value");
      char c = peek();
      if (c == quote) {
        ++pos_;
        return out;
      }
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        out += decode_entity();
        continue;
      }
      out.push_back(take());
    }
  }

  Node parse_element(int depth) {
    if (depth > kMaxDepth) fail("document too deeply nested");
    if (take() != '<') fail("expected '<'");
    Node node;
    node.name = parse_name();
    // attributes
    for (;;) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '/') {
        ++pos_;
        if (take() != '>') fail("malformed empty-element tag");
        return node;  // <name/>
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      std::string attr_name = parse_name();
      skip_ws();
      if (take() != '=') fail("attribute '" + attr_name + "' missing '='");
      skip_ws();
      node.attrs.emplace_back(std::move(attr_name), parse_attr_value());
    }
    // content
    for (;;) {
      if (eof()) fail("element '" + node.name + "' never closed");
      if (peek() == '<') {
        if (starts_with("<!--")) {
          skip_comment();
          continue;
        }
        if (starts_with("</")) {
          pos_ += 2;
          skip_ws();
          std::string closing = parse_name();
          if (closing != node.name)
            fail("mismatched close tag '" + closing + "' for '" + node.name + "'");
          skip_ws();
          if (take() != '>') fail("malformed close tag for '" + node.name + "'");
          return node;
        }
        node.children.push_back(parse_element(depth + 1));
        continue;
      }
      if (peek() == '&') {
        node.text += decode_entity();
        continue;
      }
      node.text.push_back(take());
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view Node::local_name() const {
  auto colon = name.find(':');
  return colon == std::string::npos ? std::string_view(name)
                                    : std::string_view(name).substr(colon + 1);
}

const Node* Node::child(std::string_view local) const {
  for (const auto& c : children)
    if (c.local_name() == local) return &c;
  return nullptr;
}

const std::string* Node::attr(std::string_view attr_name) const {
  for (const auto& [k, v] : attrs)
    if (k == attr_name) return &v;
  return nullptr;
}

Node parse(std::string_view doc) {
  Scanner scanner(doc);
  return scanner.parse_document();
}

std::string escape_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace soatest::xml
