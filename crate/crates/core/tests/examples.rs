// Every example under examples/ runs to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(equivalent_ages);
example!(gompertz_fit);
example!(graduation);
example!(life_table);
example!(micro_simulation);
example!(proportional_hazard);
example!(synthetic_pipeline);
