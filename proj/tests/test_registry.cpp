#include <doctest.h>

#include "helpers.hpp"
#include "soatest/registry.hpp"

using namespace soatest;

namespace {

void expect_invalid(const ServiceDescriptor& d, const std::string& fragment) {
  try {
    Registry::validate(d);
    FAIL_CHECK("descriptor accepted; wanted rejection mentioning '", fragment, "'");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidDescriptor);
    INFO("message: ", e.what());
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_SUITE("service registry") {
  TEST_CASE("a well-formed descriptor validates for every protocol") {
    CHECK_NOTHROW(Registry::validate(testutil::add_descriptor(5, Protocol::Soap)));
    CHECK_NOTHROW(Registry::validate(testutil::add_descriptor(5, Protocol::Rest)));
    CHECK_NOTHROW(Registry::validate(testutil::add_descriptor(5, Protocol::Loopback)));
  }

  TEST_CASE("each invariant is rejected with a message naming it") {
    auto d = testutil::add_descriptor(5, Protocol::Soap);

    d.service_id = 0;
    expect_invalid(d, "service_id");
    d.service_id = -3;
    expect_invalid(d, "service_id");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.name.clear();
    expect_invalid(d, "name");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.endpoints.clear();
    expect_invalid(d, "endpoints");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.endpoints[0].host = "bad host!";
    expect_invalid(d, "host");
    d.endpoints[0].host = "";
    expect_invalid(d, "host");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.endpoints[0].port = 0;
    expect_invalid(d, "port");
    d.endpoints[0].port = 70000;
    expect_invalid(d, "port");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.endpoints[0].path = "svc";
    expect_invalid(d, "path");
    d.endpoints[0].path = "";
    expect_invalid(d, "path");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.soap_namespace.clear();
    expect_invalid(d, "namespace");
    // the same descriptor without SOAP does not need a namespace
    d.protocol = Protocol::Rest;
    CHECK_NOTHROW(Registry::validate(d));

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.operations[0].op_name.clear();
    expect_invalid(d, "operation");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.operations.push_back(d.operations[0]);
    expect_invalid(d, "duplicate operation");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.operations[0].params[0].name.clear();
    expect_invalid(d, "parameter");

    d = testutil::add_descriptor(5, Protocol::Soap);
    d.operations[0].params[1].name = "x";  // collides with params[0]
    expect_invalid(d, "duplicate parameter");
  }

  TEST_CASE("registration persists, rejects duplicates, and looks up by id") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    Registry registry(store);

    CHECK(registry.register_service(testutil::add_descriptor(5, Protocol::Soap)) == 5);
    CHECK(registry.register_service(testutil::add_descriptor(7, Protocol::Rest)) == 7);

    try {
      registry.register_service(testutil::add_descriptor(5, Protocol::Rest));
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DuplicateId);
    }

    CHECK(registry.lookup_service(5).protocol == Protocol::Soap);
    try {
      (void)registry.lookup_service(42);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownService);
    }

    const auto all = registry.list_services();
    REQUIRE(all.size() == 2);
    CHECK(all[0].service_id == 5);
    CHECK(all[1].service_id == 7);

    // an invalid descriptor never reaches the journal
    auto bad = testutil::add_descriptor(9, Protocol::Soap);
    bad.endpoints.clear();
    CHECK_THROWS_AS(registry.register_service(bad), Error);
    CHECK(store.last_seq() == 2);
  }

  TEST_CASE("registered services survive a journal reopen") {
    testutil::TempDir dir;
    const std::string path = dir.file("j.jsonl");
    {
      Store store(path);
      Registry registry(store);
      registry.register_service(testutil::add_descriptor(5, Protocol::Soap));
    }
    Store store(path);
    Registry registry(store);
    const auto d = registry.lookup_service(5);
    CHECK(d.name == "ws5");
    CHECK(d.operations.at(0).op_name == "add");
    CHECK(d.operations.at(0).params.size() == 2);
  }
}
