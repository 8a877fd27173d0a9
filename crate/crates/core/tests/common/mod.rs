pub mod real_oracle;
