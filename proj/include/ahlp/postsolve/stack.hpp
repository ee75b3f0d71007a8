#ifndef AHLP_POSTSOLVE_STACK_HPP
#define AHLP_POSTSOLVE_STACK_HPP

#include "ahlp/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ahlp
{

/// Coefficient keyed by a global id (column id inside a row, row id inside a column).
struct GidEntry
{
   std::int64_t gid = -1;
   Real val = 0;
   bool operator==( const GidEntry& ) const = default;
};

struct FixedVar
{
   static constexpr const char* kName = "fixed_var";
   std::int64_t col = -1;
   Real value = 0;
   Real cost = 0;
   bool link = false;
   template <typename V> void reflect( V&& v ) { v( "col", col ); v( "value", value ); v( "cost", cost ); v( "link", link ); }
};

struct SingletonRow
{
   static constexpr const char* kName = "singleton_row";
   std::int64_t row = -1;
   std::int64_t col = -1;
   Real a = 0;
   Real old_lower = 0, old_upper = 0, new_lower = 0, new_upper = 0;
   bool equality = false;
   bool row_replicated = false;
   bool col_link = false;
   template <typename V> void reflect( V&& v )
   {
      v( "row", row ); v( "col", col ); v( "a", a ); v( "old_lower", old_lower ); v( "old_upper", old_upper );
      v( "new_lower", new_lower ); v( "new_upper", new_upper ); v( "equality", equality );
      v( "row_replicated", row_replicated ); v( "col_link", col_link );
   }
};

/// Column `col` eliminated through equality row `row`; `row_entries` are the
/// other entries of the row at elimination time.
struct SubstitutedCol
{
   static constexpr const char* kName = "substituted_col";
   std::int64_t col = -1;
   std::int64_t row = -1;
   Real a = 0;
   Real rhs = 0;
   Real cost = 0;
   bool replicated = false;
   std::vector<GidEntry> row_entries;
   template <typename V> void reflect( V&& v )
   {
      v( "col", col ); v( "row", row ); v( "a", a ); v( "rhs", rhs ); v( "cost", cost );
      v( "replicated", replicated ); v( "row_entries", row_entries );
   }
};

/// Row `deleted` = lambda * row `kept`. For two inequalities the kept row
/// received the intersection of both ranges; the flags tell which side of the
/// merged range came from the deleted row.
struct ParallelRow
{
   static constexpr const char* kName = "parallel_row";
   std::int64_t kept = -1;
   std::int64_t deleted = -1;
   Real lambda = 1;
   bool replicated = false;
   bool lower_from_deleted = false;
   bool upper_from_deleted = false;
   Real kept_lhs = 0, kept_rhs = 0;
   template <typename V> void reflect( V&& v )
   {
      v( "kept", kept ); v( "deleted", deleted ); v( "lambda", lambda ); v( "replicated", replicated );
      v( "lower_from_deleted", lower_from_deleted ); v( "upper_from_deleted", upper_from_deleted );
      v( "kept_lhs", kept_lhs ); v( "kept_rhs", kept_rhs );
   }
};

struct RedundantRow
{
   static constexpr const char* kName = "redundant_row";
   std::int64_t row = -1;
   bool replicated = false;
   template <typename V> void reflect( V&& v ) { v( "row", row ); v( "replicated", replicated ); }
};

struct ForcedCol
{
   std::int64_t col = -1;
   Real a = 0;
   Real value = 0;
   Real cost = 0;
   bool link = false;
   template <typename V> void reflect( V&& v ) { v( "col", col ); v( "a", a ); v( "value", value ); v( "cost", cost ); v( "link", link ); }
};

/// Row whose activity bound meets a side: every column sits at the bound that
/// attains the minimum (`at_min`) or maximum activity. `cols` lists the columns
/// held by the recording rank.
struct ForcingRow
{
   static constexpr const char* kName = "forcing_row";
   std::int64_t row = -1;
   bool at_min = true;
   bool equality = false;
   bool replicated = false;
   bool collective = false;
   std::vector<ForcedCol> cols;
   template <typename V> void reflect( V&& v )
   {
      v( "row", row ); v( "at_min", at_min ); v( "equality", equality ); v( "replicated", replicated );
      v( "collective", collective ); v( "cols", cols );
   }
};

struct BoundTightened
{
   static constexpr const char* kName = "bound_tightened";
   std::int64_t col = -1;
   std::int64_t row = -1;
   Real a = 0;
   bool upper = false;
   Real old_value = 0;
   Real new_value = 0;
   bool col_link = false;
   bool row_replicated = false;
   template <typename V> void reflect( V&& v )
   {
      v( "col", col ); v( "row", row ); v( "a", a ); v( "upper", upper ); v( "old_value", old_value );
      v( "new_value", new_value ); v( "col_link", col_link ); v( "row_replicated", row_replicated );
   }
};

enum class MoveKind
{
   RowLinkToZero,
   RowLinkToLocal,
   RowLocalToZero,
   ColLinkToLocal,
   ColLocalToLink
};

/// Re-classification of a row or column; values are untouched. `owner` is the
/// rank holding the local side of the move. `entries` carries the data a
/// rank needs to hold an entity that becomes replicated.
struct PermutationMove
{
   static constexpr const char* kName = "permutation_move";
   MoveKind kind = MoveKind::RowLinkToZero;
   std::int64_t gid = -1;
   int owner = 0;
   int block = 0;
   Real cost = 0;
   std::vector<GidEntry> entries;
   template <typename V> void reflect( V&& v )
   {
      int k = static_cast<int>( kind );
      v( "kind", k );
      kind = static_cast<MoveKind>( k );
      v( "gid", gid ); v( "owner", owner ); v( "block", block ); v( "cost", cost ); v( "entries", entries );
   }
};

/// Local equality row `p` replaced by the combination q = sum_k w_k row_k
/// (which includes p) placed among the replicated rows, or removed when the
/// combination vanished (q = -1). `weights` are only present on the owner.
struct LinDepCombination
{
   static constexpr const char* kName = "lindep_combination";
   std::int64_t p = -1;
   std::int64_t q = -1;
   int owner = 0;
   bool replicated = false;
   Real rhs = 0;
   std::vector<GidEntry> weights;
   std::vector<GidEntry> q_entries;
   template <typename V> void reflect( V&& v )
   {
      v( "p", p ); v( "q", q ); v( "owner", owner ); v( "replicated", replicated ); v( "rhs", rhs );
      v( "weights", weights ); v( "q_entries", q_entries );
   }
};

struct SyncEvent
{
   static constexpr const char* kName = "sync";
   std::string layout;
   template <typename V> void reflect( V&& v ) { v( "layout", layout ); }
};

using StackEntry = std::variant<FixedVar, SingletonRow, SubstitutedCol, ParallelRow, RedundantRow, ForcingRow,
                                BoundTightened, PermutationMove, LinDepCombination, SyncEvent>;

struct SnapCol
{
   std::int64_t gid = -1;
   Real lower = 0, upper = 0, cost = 0;
   bool link = false;
   template <typename V> void reflect( V&& v ) { v( "gid", gid ); v( "lower", lower ); v( "upper", upper ); v( "cost", cost ); v( "link", link ); }
};

struct SnapRow
{
   std::int64_t gid = -1;
   bool replicated = false;
   bool equality = false;
   Real lhs = 0, rhs = 0;
   std::vector<GidEntry> entries;
   template <typename V> void reflect( V&& v )
   {
      v( "gid", gid ); v( "replicated", replicated ); v( "equality", equality ); v( "lhs", lhs ); v( "rhs", rhs );
      v( "entries", entries );
   }
};

struct FinalCol
{
   std::int64_t gid = -1;
   Real cost = 0;
   bool link = false;
   template <typename V> void reflect( V&& v ) { v( "gid", gid ); v( "cost", cost ); v( "link", link ); }
};

struct FinalRow
{
   std::int64_t gid = -1;
   bool replicated = false;
   template <typename V> void reflect( V&& v ) { v( "gid", gid ); v( "replicated", replicated ); }
};

/// Everything one rank needs to undo its reductions.
struct RankStack
{
   int rank = 0;
   int nranks = 1;
   std::int64_t num_cols = 0;
   std::int64_t num_eq = 0;
   std::int64_t num_ineq = 0;
   std::vector<SnapCol> snapshot_cols;  ///< columns held after tiny-entry removal
   std::vector<SnapRow> snapshot_rows;  ///< rows held after tiny-entry removal
   std::vector<StackEntry> entries;
   std::vector<FinalCol> final_cols;    ///< columns held in the reduced problem
   std::vector<FinalRow> final_rows;    ///< rows held in the reduced problem

   template <typename T>
   void push( T e ) { entries.emplace_back( std::move( e ) ); }

   std::size_t sync_count() const
   {
      std::size_t n = 0;
      for( const auto& e : entries )
         n += std::holds_alternative<SyncEvent>( e );
      return n;
   }
};

namespace detail
{

inline nlohmann::json real_json( Real v )
{
   if( v == kInf )
      return "inf";
   if( v == -kInf )
      return "-inf";
   return v;
}

inline Real json_real( const nlohmann::json& j )
{
   if( j.is_string() )
   {
      const auto s = j.get<std::string>();
      if( s == "inf" )
         return kInf;
      if( s == "-inf" )
         return -kInf;
      throw StackCorruption( "bad real value '" + s + "'" );
   }
   if( !j.is_number() )
      throw StackCorruption( "expected a number" );
   return j.get<Real>();
}

struct Writer
{
   nlohmann::json& j;
   void operator()( const char* k, Real v ) { j[k] = real_json( v ); }
   void operator()( const char* k, std::int64_t v ) { j[k] = v; }
   void operator()( const char* k, int v ) { j[k] = v; }
   void operator()( const char* k, bool v ) { j[k] = v; }
   void operator()( const char* k, const std::string& v ) { j[k] = v; }
   void operator()( const char* k, std::vector<GidEntry>& v )
   {
      auto arr = nlohmann::json::array();
      for( const auto& e : v )
         arr.push_back( { e.gid, real_json( e.val ) } );
      j[k] = std::move( arr );
   }
   template <typename T>
   void operator()( const char* k, std::vector<T>& v )
   {
      auto arr = nlohmann::json::array();
      for( auto& e : v )
      {
         nlohmann::json o = nlohmann::json::object();
         e.reflect( Writer{ o } );
         arr.push_back( std::move( o ) );
      }
      j[k] = std::move( arr );
   }
};

struct Reader
{
   const nlohmann::json& j;
   const nlohmann::json& at( const char* k )
   {
      if( !j.is_object() || !j.contains( k ) )
         throw StackCorruption( std::string( "missing field '" ) + k + "'" );
      return j.at( k );
   }
   void operator()( const char* k, Real& v ) { v = json_real( at( k ) ); }
   void operator()( const char* k, std::int64_t& v ) { v = integer( at( k ), k ); }
   void operator()( const char* k, int& v ) { v = static_cast<int>( integer( at( k ), k ) ); }
   void operator()( const char* k, bool& v )
   {
      const auto& x = at( k );
      if( !x.is_boolean() )
         throw StackCorruption( std::string( "field '" ) + k + "' is not a boolean" );
      v = x.get<bool>();
   }
   void operator()( const char* k, std::string& v )
   {
      const auto& x = at( k );
      if( !x.is_string() )
         throw StackCorruption( std::string( "field '" ) + k + "' is not a string" );
      v = x.get<std::string>();
   }
   void operator()( const char* k, std::vector<GidEntry>& v )
   {
      const auto& x = at( k );
      if( !x.is_array() )
         throw StackCorruption( std::string( "field '" ) + k + "' is not an array" );
      v.clear();
      for( const auto& e : x )
      {
         if( !e.is_array() || e.size() != 2 )
            throw StackCorruption( std::string( "bad entry in '" ) + k + "'" );
         v.push_back( { integer( e[0], k ), json_real( e[1] ) } );
      }
   }
   template <typename T>
   void operator()( const char* k, std::vector<T>& v )
   {
      const auto& x = at( k );
      if( !x.is_array() )
         throw StackCorruption( std::string( "field '" ) + k + "' is not an array" );
      v.clear();
      for( const auto& e : x )
      {
         T item;
         item.reflect( Reader{ e } );
         v.push_back( std::move( item ) );
      }
   }
   static std::int64_t integer( const nlohmann::json& x, const char* k )
   {
      if( !x.is_number_integer() )
         throw StackCorruption( std::string( "field '" ) + k + "' is not an integer" );
      return x.get<std::int64_t>();
   }
};

template <std::size_t I = 0>
StackEntry entry_from_name( const std::string& name, const nlohmann::json& j )
{
   if constexpr( I == std::variant_size_v<StackEntry> )
      throw StackCorruption( "unknown stack entry type '" + name + "'" );
   else
   {
      using T = std::variant_alternative_t<I, StackEntry>;
      if( name == T::kName )
      {
         T e;
         e.reflect( Reader{ j } );
         return e;
      }
      return entry_from_name<I + 1>( name, j );
   }
}

} // namespace detail

inline nlohmann::json to_json( const StackEntry& e )
{
   return std::visit(
       []( auto x ) {
          nlohmann::json j = nlohmann::json::object();
          j["type"] = decltype( x )::kName;
          x.reflect( detail::Writer{ j } );
          return j;
       },
       e );
}

inline StackEntry entry_from_json( const nlohmann::json& j )
{
   if( !j.is_object() || !j.contains( "type" ) || !j["type"].is_string() )
      throw StackCorruption( "stack entry without type" );
   return detail::entry_from_name( j["type"].get<std::string>(), j );
}

inline nlohmann::json to_json( const RankStack& s )
{
   nlohmann::json j = nlohmann::json::object();
   auto& rs = const_cast<RankStack&>( s );
   detail::Writer w{ j };
   w( "rank", rs.rank );
   w( "nranks", rs.nranks );
   w( "num_cols", rs.num_cols );
   w( "num_eq", rs.num_eq );
   w( "num_ineq", rs.num_ineq );
   w( "snapshot_cols", rs.snapshot_cols );
   w( "snapshot_rows", rs.snapshot_rows );
   w( "final_cols", rs.final_cols );
   w( "final_rows", rs.final_rows );
   auto arr = nlohmann::json::array();
   for( const auto& e : s.entries )
      arr.push_back( to_json( e ) );
   j["entries"] = std::move( arr );
   return j;
}

inline RankStack rank_stack_from_json( const nlohmann::json& j )
{
   RankStack s;
   detail::Reader r{ j };
   r( "rank", s.rank );
   r( "nranks", s.nranks );
   r( "num_cols", s.num_cols );
   r( "num_eq", s.num_eq );
   r( "num_ineq", s.num_ineq );
   r( "snapshot_cols", s.snapshot_cols );
   r( "snapshot_rows", s.snapshot_rows );
   r( "final_cols", s.final_cols );
   r( "final_rows", s.final_rows );
   const auto& arr = r.at( "entries" );
   if( !arr.is_array() )
      throw StackCorruption( "entries is not an array" );
   for( const auto& e : arr )
      s.entries.push_back( entry_from_json( e ) );
   return s;
}

} // namespace ahlp

#endif
