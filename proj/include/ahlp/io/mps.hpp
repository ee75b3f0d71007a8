#ifndef AHLP_IO_MPS_HPP
#define AHLP_IO_MPS_HPP

#include "ahlp/model/block_problem.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace ahlp
{

/// Magnitudes at or above this value read as infinite.
inline constexpr Real kMpsInfinity = 1e30;

namespace detail
{

   inline std::vector<std::string> split_ws( const std::string& line )
   {
      std::vector<std::string> out;
      std::istringstream in( line );
      for( std::string t; in >> t; )
         out.push_back( t );
      return out;
   }

   inline std::string format_real( Real v )
   {
      if( v == kInf )
         return "1e+30";
      if( v == -kInf )
         return "-1e+30";
      char buf[64];
      auto res = std::to_chars( buf, buf + sizeof( buf ), v );
      return std::string( buf, res.ptr );
   }

   class MpsReader
   {
    public:
      MpsReader( std::istream& in, std::string file ) : in_( in ), file_( std::move( file ) ) {}

      MonolithicLP read()
      {
         std::string line;
         std::string section;
         while( std::getline( in_, line ) )
         {
            ++lineno_;
            if( !line.empty() && line.back() == '\r' )
               line.pop_back();
            if( line.empty() || line[0] == '*' )
               continue;
            auto tok = split_ws( line );
            if( tok.empty() )
               continue;
            if( !std::isspace( static_cast<unsigned char>( line[0] ) ) )
            {
               const std::string previous = section;
               section = tok[0];
               if( section == "NAME" )
                  name_ = tok.size() > 1 ? tok[1] : "";
               else if( section == "OBJSENSE" )
               {
                  if( tok.size() > 1 )
                     objsense( tok[1] );
               }
               else if( section == "ENDATA" )
               {
                  ended_ = true;
                  break;
               }
               else if( ( section == "MAX" || section == "MIN" ) && previous == "OBJSENSE" )
               {
                  objsense( section );
                  section = previous;
               }
               else if( section != "ROWS" && section != "COLUMNS" && section != "RHS" && section != "RANGES" &&
                        section != "BOUNDS" )
                  fail( "unknown section '" + section + "'" );
               continue;
            }
            if( section == "OBJSENSE" )
               objsense( tok[0] );
            else if( section == "ROWS" )
               row( tok );
            else if( section == "COLUMNS" )
               column( tok );
            else if( section == "RHS" )
               pairs( tok, [this]( Index r, Real v ) { rhs( r, v ); } );
            else if( section == "RANGES" )
               pairs( tok, [this]( Index r, Real v ) { range( r, v ); } );
            else if( section == "BOUNDS" )
               bound( tok );
            else
               fail( "data line outside of a section" );
         }
         if( !ended_ )
            fail( "missing ENDATA" );
         return build();
      }

    private:
      struct Row
      {
         char kind;
         std::string name;
         Real rhs = 0;
         Real range = 0;
         bool has_range = false;
         bool has_rhs = false;
      };
      struct Col
      {
         std::string name;
         Real cost = 0;
         Real lower = 0;
         Real upper = kInf;
         bool upper_set = false;
         bool lower_set = false;
      };

      std::istream& in_;
      std::string file_;
      int lineno_ = 0;
      bool ended_ = false;
      std::string name_;
      std::vector<Row> rows_;
      std::unordered_map<std::string, Index> row_index_;
      Index objective_ = -1;
      Real objective_rhs_ = 0;
      std::vector<Col> cols_;
      std::unordered_map<std::string, Index> col_index_;
      std::vector<std::vector<std::pair<Index, Real>>> entries_; ///< per column
      std::set<std::pair<Index, Index>> seen_;
      std::set<Index> rhs_seen_, range_seen_;

      [[noreturn]] void fail( const std::string& msg ) const { throw ParseError( file_, lineno_, msg ); }

      Real number( const std::string& s ) const
      {
         char* end = nullptr;
         const Real v = std::strtod( s.c_str(), &end );
         if( end == s.c_str() || *end != '\0' || std::isnan( v ) )
            fail( "invalid number '" + s + "'" );
         if( v >= kMpsInfinity )
            return kInf;
         if( v <= -kMpsInfinity )
            return -kInf;
         return v;
      }

      void objsense( const std::string& s )
      {
         if( s == "MAX" || s == "MAXIMIZE" )
            fail( "maximization is not supported" );
         if( s != "MIN" && s != "MINIMIZE" )
            fail( "unknown objective sense '" + s + "'" );
      }

      void row( const std::vector<std::string>& tok )
      {
         if( tok.size() != 2 || tok[0].size() != 1 || std::string( "NLGE" ).find( tok[0][0] ) == std::string::npos )
            fail( "malformed ROWS entry" );
         if( row_index_.count( tok[1] ) )
            fail( "duplicate row '" + tok[1] + "'" );
         const Index i = static_cast<Index>( rows_.size() );
         if( tok[0][0] == 'N' && objective_ < 0 )
            objective_ = i;
         row_index_[tok[1]] = i;
         rows_.push_back( { tok[0][0], tok[1] } );
      }

      Index find_row( const std::string& name ) const
      {
         auto it = row_index_.find( name );
         if( it == row_index_.end() )
            fail( "unknown row '" + name + "'" );
         return it->second;
      }

      Index find_col( const std::string& name ) const
      {
         auto it = col_index_.find( name );
         if( it == col_index_.end() )
            fail( "unknown column '" + name + "'" );
         return it->second;
      }

      void column( const std::vector<std::string>& tok )
      {
         if( tok.size() >= 2 && tok[1] == "'MARKER'" )
            fail( "integer markers are not supported" );
         if( tok.size() != 3 && tok.size() != 5 )
            fail( "malformed COLUMNS entry" );
         Index j;
         if( !cols_.empty() && cols_.back().name == tok[0] )
            j = static_cast<Index>( cols_.size() ) - 1;
         else
         {
            if( col_index_.count( tok[0] ) )
               fail( "column '" + tok[0] + "' is not contiguous" );
            j = static_cast<Index>( cols_.size() );
            col_index_[tok[0]] = j;
            cols_.push_back( { tok[0] } );
            entries_.emplace_back();
         }
         for( std::size_t k = 1; k + 1 < tok.size(); k += 2 )
         {
            const Index r = find_row( tok[k] );
            if( !seen_.insert( { j, r } ).second )
               fail( "duplicate entry for column '" + tok[0] + "' in row '" + tok[k] + "'" );
            const Real v = number( tok[k + 1] );
            if( !is_finite( v ) )
               fail( "infinite matrix coefficient" );
            if( r == objective_ )
               cols_[j].cost = v;
            else if( v != 0 )
               entries_[j].push_back( { r, v } );
         }
      }

      template <typename F>
      void pairs( const std::vector<std::string>& tok, F&& apply )
      {
         const std::size_t first = tok.size() % 2 == 0 ? 0 : 1;
         if( tok.size() < 2 || tok.size() > 5 )
            fail( "malformed entry" );
         for( std::size_t k = first; k + 1 < tok.size(); k += 2 )
            apply( find_row( tok[k] ), number( tok[k + 1] ) );
      }

      void rhs( Index r, Real v )
      {
         if( !rhs_seen_.insert( r ).second )
            fail( "duplicate RHS for row '" + rows_[r].name + "'" );
         if( r == objective_ )
         {
            objective_rhs_ = v;
            return;
         }
         rows_[r].rhs = v;
         rows_[r].has_rhs = true;
      }

      void range( Index r, Real v )
      {
         if( !range_seen_.insert( r ).second )
            fail( "duplicate RANGES entry for row '" + rows_[r].name + "'" );
         if( rows_[r].kind == 'N' )
            fail( "RANGES entry on free row '" + rows_[r].name + "'" );
         rows_[r].range = v;
         rows_[r].has_range = true;
      }

      void bound( const std::vector<std::string>& tok )
      {
         if( tok.empty() )
            fail( "malformed BOUNDS entry" );
         const std::string& type = tok[0];
         const bool valued = type == "UP" || type == "LO" || type == "FX";
         const bool flag = type == "FR" || type == "MI" || type == "PL";
         if( !valued && !flag )
            fail( "unsupported bound type '" + type + "'" );
         std::string name;
         Real v = 0;
         if( valued )
         {
            if( tok.size() != 3 && tok.size() != 4 )
               fail( "malformed BOUNDS entry" );
            name = tok[tok.size() - 2];
            v = number( tok.back() );
         }
         else
         {
            if( tok.size() < 2 || tok.size() > 4 )
               fail( "malformed BOUNDS entry" );
            name = tok.size() == 2 ? tok[1] : tok[2];
         }
         auto& c = cols_[find_col( name )];
         if( type == "UP" )
         {
            c.upper = v;
            c.upper_set = true;
            if( v < 0 && c.lower == 0 && !c.lower_set )
               c.lower = -kInf;
         }
         else if( type == "LO" )
         {
            c.lower = v;
            c.lower_set = true;
         }
         else if( type == "FX" )
         {
            if( !is_finite( v ) )
               fail( "infinite fixed bound" );
            c.lower = c.upper = v;
            c.lower_set = c.upper_set = true;
         }
         else if( type == "FR" )
         {
            c.lower = -kInf;
            c.upper = kInf;
            c.lower_set = c.upper_set = true;
         }
         else if( type == "MI" )
         {
            c.lower = -kInf;
            c.lower_set = true;
         }
         else
         {
            c.upper = kInf;
            c.upper_set = true;
         }
      }

      MonolithicLP build()
      {
         MonolithicLP lp;
         lp.name = name_;
         lp.objective_offset = -objective_rhs_;
         std::vector<Index> eq_pos( rows_.size(), -1 ), ineq_pos( rows_.size(), -1 );
         for( Index i = 0; i < static_cast<Index>( rows_.size() ); ++i )
         {
            if( i == objective_ )
               continue;
            const auto& r = rows_[i];
            const Real a = std::fabs( r.range );
            Real lo = -kInf, hi = kInf;
            switch( r.kind )
            {
            case 'E':
               lo = hi = r.rhs;
               if( r.has_range && r.range > 0 )
                  hi = r.rhs + a;
               else if( r.has_range && r.range < 0 )
                  lo = r.rhs - a;
               break;
            case 'L':
               hi = r.rhs;
               if( r.has_range )
                  lo = r.rhs - a;
               break;
            case 'G':
               lo = r.rhs;
               if( r.has_range )
                  hi = r.rhs + a;
               break;
            default: break;
            }
            if( ( r.kind == 'E' && !is_finite( r.rhs ) ) || lo > hi )
            {
               lineno_ = 0;
               fail( "row '" + r.name + "' has inconsistent sides" );
            }
            if( r.kind == 'E' && lo == hi )
            {
               eq_pos[i] = lp.neq();
               lp.b.push_back( lo );
               lp.eq_names.push_back( r.name );
            }
            else
            {
               ineq_pos[i] = lp.nineq();
               lp.d.push_back( lo );
               lp.f.push_back( hi );
               lp.ineq_names.push_back( r.name );
            }
         }
         std::vector<Triplet> eq, ineq;
         for( Index j = 0; j < static_cast<Index>( cols_.size() ); ++j )
         {
            const auto& c = cols_[j];
            if( c.lower > c.upper )
            {
               lineno_ = 0;
               fail( "column '" + c.name + "' has crossing bounds" );
            }
            lp.c.push_back( c.cost );
            lp.l.push_back( c.lower );
            lp.u.push_back( c.upper );
            lp.col_names.push_back( c.name );
            for( auto [r, v] : entries_[j] )
            {
               if( eq_pos[r] >= 0 )
                  eq.push_back( { eq_pos[r], j, v } );
               else
                  ineq.push_back( { ineq_pos[r], j, v } );
            }
         }
         lp.A = SparseMatrix::from_triplets( lp.neq(), lp.ncols(), std::move( eq ) );
         lp.C = SparseMatrix::from_triplets( lp.nineq(), lp.ncols(), std::move( ineq ) );
         return lp;
      }
   };

} // namespace detail

inline MonolithicLP read_mps( std::istream& in, const std::string& file = "<stream>" )
{
   return detail::MpsReader( in, file ).read();
}

inline MonolithicLP read_mps( const std::string& path )
{
   std::ifstream in( path );
   if( !in )
      throw std::runtime_error( "cannot open " + path );
   return read_mps( in, path );
}

/// Free-form MPS. Equality rows are written first as E rows, then
/// inequalities as L, G, ranged L or free N rows. The objective offset goes
/// to the RHS of the objective row with flipped sign.
inline void write_mps( const MonolithicLP& lp, std::ostream& out )
{
   using detail::format_real;
   const std::string obj = "OBJ";
   out << "NAME " << ( lp.name.empty() ? "AHLP" : lp.name ) << "\n";
   out << "ROWS\n";
   out << " N " << obj << "\n";
   for( const auto& n : lp.eq_names )
      out << " E " << n << "\n";
   auto ineq_kind = [&]( Index i ) {
      const bool lo = is_finite( lp.d[i] ), hi = is_finite( lp.f[i] );
      return hi ? 'L' : lo ? 'G' : 'N';
   };
   for( Index i = 0; i < lp.nineq(); ++i )
      out << " " << ineq_kind( i ) << " " << lp.ineq_names[i] << "\n";

   out << "COLUMNS\n";
   std::vector<std::vector<std::pair<std::string, Real>>> by_col( lp.ncols() );
   auto collect = [&]( const SparseMatrix& m, const std::vector<std::string>& names ) {
      for( Index i = 0; i < m.rows(); ++i )
      {
         const auto cols = m.row_cols( i );
         const auto vals = m.row_vals( i );
         for( std::size_t k = 0; k < cols.size(); ++k )
            by_col[cols[k]].push_back( { names[i], vals[k] } );
      }
   };
   collect( lp.A, lp.eq_names );
   collect( lp.C, lp.ineq_names );
   for( Index j = 0; j < lp.ncols(); ++j )
   {
      const auto& name = lp.col_names[j];
      bool any = false;
      if( lp.c[j] != 0 )
      {
         out << " " << name << " " << obj << " " << format_real( lp.c[j] ) << "\n";
         any = true;
      }
      for( const auto& [row, v] : by_col[j] )
      {
         out << " " << name << " " << row << " " << format_real( v ) << "\n";
         any = true;
      }
      if( !any )
         out << " " << name << " " << obj << " 0\n";
   }

   out << "RHS\n";
   if( lp.objective_offset != 0 )
      out << " RHS " << obj << " " << format_real( -lp.objective_offset ) << "\n";
   for( Index i = 0; i < lp.neq(); ++i )
      if( lp.b[i] != 0 )
         out << " RHS " << lp.eq_names[i] << " " << format_real( lp.b[i] ) << "\n";
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      const char k = ineq_kind( i );
      const Real v = k == 'L' ? lp.f[i] : k == 'G' ? lp.d[i] : 0;
      if( v != 0 )
         out << " RHS " << lp.ineq_names[i] << " " << format_real( v ) << "\n";
   }

   bool ranges = false;
   for( Index i = 0; i < lp.nineq(); ++i )
      if( is_finite( lp.d[i] ) && is_finite( lp.f[i] ) )
      {
         if( !ranges )
            out << "RANGES\n";
         ranges = true;
         out << " RNG " << lp.ineq_names[i] << " " << format_real( lp.f[i] - lp.d[i] ) << "\n";
      }

   out << "BOUNDS\n";
   for( Index j = 0; j < lp.ncols(); ++j )
   {
      const auto& n = lp.col_names[j];
      const Real l = lp.l[j], u = lp.u[j];
      if( l == u )
         out << " FX BND " << n << " " << format_real( l ) << "\n";
      else if( !is_finite( l ) && !is_finite( u ) )
         out << " FR BND " << n << "\n";
      else
      {
         if( !is_finite( l ) )
            out << " MI BND " << n << "\n";
         else if( l != 0 )
            out << " LO BND " << n << " " << format_real( l ) << "\n";
         if( is_finite( u ) )
            out << " UP BND " << n << " " << format_real( u ) << "\n";
      }
   }
   out << "ENDATA\n";
}

inline void write_mps( const MonolithicLP& lp, const std::string& path )
{
   std::ofstream out( path );
   if( !out )
      throw std::runtime_error( "cannot write " + path );
   write_mps( lp, out );
   if( !out )
      throw std::runtime_error( "write failed for " + path );
}

} // namespace ahlp

#endif
