//! Name-keyed registries of interchangeable algorithm strategies.

use crate::error::{Error, Result};

pub type Constructor<T> = fn() -> Box<T>;

/// Constructors of one strategy family, selected by name at runtime.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Constructor<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, name: &'static str, ctor: Constructor<T>) -> Self {
        self.register(name, ctor);
        self
    }

    /// Adds or replaces the constructor registered under `name`.
    pub fn register(&mut self, name: &'static str, ctor: Constructor<T>) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => e.1 = ctor,
            None => self.entries.push((name, ctor)),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greet {
        fn hi(&self) -> &'static str;
    }
    struct A;
    struct B;
    impl Greet for A {
        fn hi(&self) -> &'static str {
            "a"
        }
    }
    impl Greet for B {
        fn hi(&self) -> &'static str {
            "b"
        }
    }

    #[test]
    fn lookup_and_replace() {
        let mut r: Registry<dyn Greet> = Registry::new("greeter")
            .with("a", || Box::new(A) as Box<dyn Greet>)
            .with("b", || Box::new(B) as Box<dyn Greet>);
        assert_eq!(r.names(), vec!["a", "b"]);
        assert_eq!(r.create("b").unwrap().hi(), "b");
        r.register("b", || Box::new(A) as Box<dyn Greet>);
        assert_eq!(r.create("b").unwrap().hi(), "a");
        match r.create("c") {
            Err(Error::UnknownStrategy {
                kind, available, ..
            }) => {
                assert_eq!(kind, "greeter");
                assert_eq!(available, "a, b");
            }
            _ => panic!(),
        }
    }
}
