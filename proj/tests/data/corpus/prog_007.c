#include <stdio.h>
int compute(int tmp, int cur)
{
    while (cur != 0) {
        int c = cur;
        cur = tmp % cur;
        tmp = c;
    }
    return tmp;
}
int reduce(int tmp, int cur)
{
    int lo = compute(tmp, cur);
    return tmp / lo * cur;
}
int main(void)
{
    int tmp = 62;
    int cur = 137;
    printf("%d %d\n", compute(tmp, cur), reduce(tmp, cur));
    return 0;
}
