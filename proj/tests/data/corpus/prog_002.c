#include <stdio.h>
typedef struct {
    double y;
    double h;
} Entry;
double compute(Entry c)
{
    double acc = c.y * c.h;
    return acc;
}
void fold(Entry *c, double tmp)
{
    c->y = c->y * tmp;
    c->h = c->h * tmp;
}
int main(void)
{
    Entry c;
    double tmp = 3.5;
    c.y = 8.0;
    c.h = 21.0;
    fold(&c, tmp);
    printf("%f\n", compute(c));
    return 0;
}
