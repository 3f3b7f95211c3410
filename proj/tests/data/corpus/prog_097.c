#include <stdio.h>
struct Entry {
    int x;
    int w;
};
int apply(struct Entry a, struct Entry val)
{
    int step = a.x - val.x;
    step = step + a.w - val.w;
    return step;
}
int main(void)
{
    struct Entry a;
    struct Entry val;
    a.x = 12;
    a.w = 9;
    val.x = 4;
    val.w = 13;
    printf("%d\n", apply(a, val));
    return 0;
}
